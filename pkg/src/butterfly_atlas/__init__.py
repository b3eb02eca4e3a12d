"""Rational Hofstadter butterfly atlas.

Spectra of the almost Mathieu operator at rational flux, the self-similarity
maps of the butterfly, gap labels, the integrated density of states and the
plane curves that realize the horizontal part of each similarity.
"""
from .curves import ImplicitCurve, classify_symmetry, diagonal_segments, trace_curve
from .errors import ButterflyError, InvalidInput, NotInSemigroup, NumericalFailure
from .gaps import GapLabel, canonicalize, label_gap, transport_label
from .ids import IDSEvaluator, ids_F, trace_below
from .moebius import A, B, IDENTITY, GeneratorWord, ProjMat, Rational, factor_word, farey, in_semigroup, lft_apply
from .render import RenderConfig, render_butterfly, render_similarity_overlay
from .similarity import (
    H, S, V, MappedPoint, Similarity, apply_pointwise, compose, generator, inverse_map_point,
    map_band_index, map_point, r_max,
)
from .spectrum import BandSpectrum, CharPoly, band_edges, chambers_residual, charpoly_coeffs, charpoly_eval

__version__ = "0.1.0"
