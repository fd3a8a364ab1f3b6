"""Streaming clustering of graphs with side information."""

from ._gssclu import *  # noqa: F401,F403
from ._gssclu import __version__, EngineConfig, ExactEngine, SketchEngine, read_stream


def cluster_file(path, config=None, backend="sketch", strict=False):
    """Cluster a stream file. Returns (engine, events, graphs)."""
    schema, graphs, _ = read_stream(path, strict)
    engine_type = {"sketch": SketchEngine, "exact": ExactEngine}[backend]
    engine = engine_type(config if config is not None else EngineConfig(), schema)
    return engine, engine.run(graphs), graphs
