"""Python bindings for the archfmt web archive formats.

The heavy lifting happens in the C++ extension; this package re-exports it.
"""

from ._archfmt import (
    ArchfmtError,
    Dataset,
    build_cdx,
    canonicalize_url,
    convert,
    extract_links,
    extract_text,
    generate_corpus,
    parse_timestamp14,
    parse_warc_date,
    payload_digest,
    prepare_dataset,
    query,
    scan_extract,
    timestamp14,
)

BACKENDS = ("warc", "warc_cdx", "carc", "rarc")

__all__ = [
    "ArchfmtError",
    "BACKENDS",
    "Dataset",
    "build_cdx",
    "canonicalize_url",
    "convert",
    "extract_links",
    "extract_text",
    "generate_corpus",
    "parse_timestamp14",
    "parse_warc_date",
    "payload_digest",
    "prepare_dataset",
    "query",
    "scan_extract",
    "timestamp14",
]
