"""Result writers; every file is UTF-8 and byte-stable for equal inputs."""

import hashlib
import json
import os

from geoscale._logger import logger

__all__ = [
    "dump_json",
    "write_json",
    "write_text",
    "write_csv",
    "write_result",
    "sha256_of",
]


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_text(path, text) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fp:
        fp.write(text)
    logger.info("wrote %s", path)


def write_json(path, obj) -> None:
    write_text(path, dump_json(obj))


def write_csv(path, frame) -> None:
    """Write a DataFrame without its index, floats in repr precision."""
    frame.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    logger.info("wrote %d rows to %s", len(frame), path)


def write_result(result, out_dir, dump_graph=None) -> list:
    """Write clusters.json, clusters.geojson and dropped.json.

    Returns the written paths.
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = [
        os.path.join(out_dir, "clusters.json"),
        os.path.join(out_dir, "clusters.geojson"),
        os.path.join(out_dir, "dropped.json"),
    ]
    write_text(paths[0], result.to_json())
    write_json(paths[1], result.to_geojson())
    write_text(paths[2], result.dropped_json())
    if dump_graph is not None:
        path = os.path.join(out_dir, "graph.txt")
        dump_graph.to_edge_list(path)
        paths.append(path)
    return paths


def sha256_of(path) -> str:
    """Hex digest of a file's bytes."""
    digest = hashlib.sha256()
    with open(path, "rb") as fp:
        for chunk in iter(lambda: fp.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()
