"""starpir: private information retrieval over star products of GRS codes.

Storage is a GRS code over GF(q^m); queries come from a retrieval code
that can be the plain GRS code, its subfield subcode, or its trace
code.  The base-field variants cut server-side response work down to
base-field scalar operations (XORs when q = 2) at the cost of some
collusion protection.  Everything is exact: finite-field tables,
integer operation counts, rational rates.
"""

from .codes import GrsSpec, LinearCode
from .gf import Field
from .harness import OpCounts, compare_variants, verify_correctness, verify_privacy
from .pir import (
    SchemeConfig,
    SchemeDerived,
    Variant,
    derive_scheme,
    encode_storage,
    generate_queries,
    retrieve_file,
)

__version__ = "0.1.0"

__all__ = [
    "Field",
    "GrsSpec",
    "LinearCode",
    "OpCounts",
    "SchemeConfig",
    "SchemeDerived",
    "Variant",
    "compare_variants",
    "derive_scheme",
    "encode_storage",
    "generate_queries",
    "retrieve_file",
    "verify_correctness",
    "verify_privacy",
    "__version__",
]
