"""One-shot SSVEP decoding: least-squares domain mapping, spatial-filter
decoders, a dual-domain network and a leave-one-subject-out harness."""

from ._core import (
    SsvepError,
    ablate,
    benchmark,
    cca_correlations,
    evaluate,
    filterbank_decompose,
    fuse,
    itr,
    lst_solve,
    minmax_normalize,
    reference_template,
    synth_generate,
    synth_save,
)
from . import dataset


def error_code(exc: SsvepError) -> str:
    """Machine-readable code of an SsvepError, e.g. 'insufficient-subjects'."""
    return exc.args[0] if exc.args else ""


__all__ = [
    "SsvepError",
    "ablate",
    "benchmark",
    "cca_correlations",
    "error_code",
    "evaluate",
    "filterbank_decompose",
    "fuse",
    "itr",
    "lst_solve",
    "minmax_normalize",
    "reference_template",
    "dataset",
    "synth_generate",
    "synth_save",
]
