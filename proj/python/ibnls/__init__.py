"""Exact well-posedness certificates and a pseudospectral solver for the
inhomogeneous biharmonic NLS equation i u_t + Delta^2 u = lambda |x|^{-b} |u|^sigma u.

The heavy lifting lives in the compiled extension; this wrapper decodes the
JSON surfaces of the certificate engine into plain dicts.
"""

import json as _json

from ibnls._core import (  # noqa: F401
    energy,
    evolve,
    gaussian_field,
    linear_propagate,
    mass,
    mode_field,
    picard,
    scaling_transform,
    sobolev_norm,
)
from ibnls import _core


def classify(d, s, b, sigma, lam=1.0):
    """Verdict dict for the local well-posedness hypotheses."""
    return _json.loads(_core.classify(d, str(s), str(b), str(sigma), lam))


def certify(d, s, b, sigma, lam=1.0):
    """Full exponent certificate as a dict."""
    return _json.loads(_core.certify(d, str(s), str(b), str(sigma), lam))


def certify_json(d, s, b, sigma, lam=1.0):
    """Full exponent certificate in its canonical JSON text form."""
    return _core.certify(d, str(s), str(b), str(sigma), lam)


def verify(certificate):
    """Re-verify a certificate (dict or JSON text); returns the report dict."""
    if not isinstance(certificate, str):
        certificate = _json.dumps(certificate)
    return _json.loads(_core.verify(certificate))


def sweep(n, seed=1):
    """Randomized certificate soundness sweep; returns the summary dict."""
    return _json.loads(_core.sweep(n, seed))
