from ._core import compare, emit, preset, rank, run, summarize

__all__ = ["compare", "emit", "preset", "rank", "run", "summarize"]
