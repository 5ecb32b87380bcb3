from src.backend.formats.text import (
    group_lines,
    read_complement,
    read_gaingraph,
    read_group,
    read_manifest,
    read_matroid,
    read_system,
    write_complement,
    write_gaingraph,
    write_group,
    write_matroid,
    write_system,
)

__all__ = [
    "group_lines",
    "read_complement",
    "read_gaingraph",
    "read_group",
    "read_manifest",
    "read_matroid",
    "read_system",
    "write_complement",
    "write_gaingraph",
    "write_group",
    "write_matroid",
    "write_system",
]
