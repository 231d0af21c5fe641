"""stratcx: rank strata of varieties of complexes and the delta complexes of
integrable 1-forms on projective space, in exact rational arithmetic."""

__version__ = "0.1.0"
