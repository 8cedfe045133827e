"""Versioned, digest-checked structured-text containers.

Every artifact the pipeline writes (.xadschema, .xadfm, .xaddict, .xadmodel,
.xadtruth) is a three-part text file:

    xmlad-<kind> v1
    sha256:<hex digest of the body>
    <canonical JSON body>

The JSON body is serialized with sorted keys and no optional whitespace, so
identical in-memory objects always produce byte-identical files.  Floats go
through Python's repr, which round-trips exactly.
"""

import hashlib
import json

from .errors import CorruptFile, VersionMismatch

FORMAT_VERSION = 1


def dumps(kind: str, body) -> str:
    payload = json.dumps(body, sort_keys=True, separators=(",", ":"),
                         allow_nan=False)
    digest = hashlib.sha256(payload.encode("utf-8")).hexdigest()
    return f"xmlad-{kind} v{FORMAT_VERSION}\nsha256:{digest}\n{payload}\n"


def loads(kind: str, text: str):
    lines = text.split("\n", 2)
    if len(lines) < 3:
        raise CorruptFile("truncated container")
    header, digest_line, payload = lines
    if not header.startswith(f"xmlad-{kind} v"):
        raise VersionMismatch(f"expected an xmlad-{kind} header, got {header!r}")
    try:
        version = int(header.rsplit("v", 1)[1])
    except ValueError:
        raise VersionMismatch(f"unreadable version in header {header!r}")
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"unsupported {kind} version {version}")
    payload = payload.rstrip("\n")
    if not digest_line.startswith("sha256:"):
        raise CorruptFile("missing digest line")
    expected = digest_line[len("sha256:"):]
    actual = hashlib.sha256(payload.encode("utf-8")).hexdigest()
    if actual != expected:
        raise CorruptFile("content digest mismatch")
    try:
        return json.loads(payload)
    except json.JSONDecodeError as exc:
        raise CorruptFile(f"unreadable body: {exc}")


def write(path, kind: str, body) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(kind, body))


def read(path, kind: str):
    with open(path, "r", encoding="utf-8") as fh:
        return loads(kind, fh.read())
