"""Extended Koszul complexes of a regular sequence.

Free resolutions of ``I^s``, ``R/I^s`` and ``I^s/I^t``, Tor tables over
``E = R/I`` with freeness certificates, the connecting homomorphism and the
bigraded algebra ``sum_s Tor(E, I^s)``.
"""

from ._core import BACKEND
from .koszul import Element, ExtendedKoszul, KoszulIndex

__version__ = "0.1.0"


def clear_caches():
    """Drop memoized label rules and snake complexes (used for cold timings)."""
    from . import koszul, tor

    for fn in (koszul.dh_label, koszul.contraction_label, koszul.multiply_labels, koszul.multiply_labels_central):
        fn.cache_clear()
    tor._snake_complexes.cache_clear()


__all__ = ["BACKEND", "Element", "ExtendedKoszul", "KoszulIndex", "__version__", "clear_caches"]
