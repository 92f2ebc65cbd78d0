# fitting/reference_models.py
# Published 3D CFM coefficient sets, listed in CFM3D_TERMS order:
# 1, v, d, d^2, d*h, h^2, d^2*v, d*v^2, d*h^2
from src.dataio.grids import KUKA_FULL_GRID, UR10E_FULL_GRID
from src.fitting.CFMModel import CFMModel, DomainBox
from src.fitting.terms import CFM3D_TERMS, sort_terms
from src.shared.errors import ContractError

UR10E_COEFFICIENTS = (6.2990, 3.3761, -1.1050, -1.3066, -1.5258, -6.6954, 4.0919, -6.0090, 8.5207)
KUKA_30NM_COEFFICIENTS = (7.0641, 4.2943, -4.5286, 0.9917, -0.5795, -6.0074, 3.9366, -7.2169, 7.0446)
KUKA_10NM_COEFFICIENTS = (6.6936, 4.9297, -4.4782, 1.2926, -0.3758, -5.5669, 3.2609, -7.2332, 6.4016)


def build_cfm3d_model(coefficients, label, domain=None):
    """CFMModel over the nine published terms, stored in graded-lex order."""
    if len(coefficients) != len(CFM3D_TERMS):
        raise ContractError(f"expected {len(CFM3D_TERMS)} coefficients, got {len(coefficients)}")
    by_term = dict(zip(CFM3D_TERMS, coefficients))
    terms = sort_terms(CFM3D_TERMS)
    return CFMModel(tuple(terms), tuple(by_term[t] for t in terms), label=label, domain=domain)


UR10E_MODEL = build_cfm3d_model(UR10E_COEFFICIENTS, "ur10e", DomainBox.from_grid(UR10E_FULL_GRID))
KUKA_30NM_MODEL = build_cfm3d_model(KUKA_30NM_COEFFICIENTS, "kuka-30nm", DomainBox.from_grid(KUKA_FULL_GRID))
KUKA_10NM_MODEL = build_cfm3d_model(KUKA_10NM_COEFFICIENTS, "kuka-10nm", DomainBox.from_grid(KUKA_FULL_GRID))

REFERENCE_MODELS = {
    "ur10e": UR10E_MODEL,
    "kuka-30nm": KUKA_30NM_MODEL,
    "kuka-10nm": KUKA_10NM_MODEL,
}


def reference_model(name):
    try:
        return REFERENCE_MODELS[name]
    except KeyError:
        raise ContractError(
            f"unknown reference model {name!r}, choose from {', '.join(REFERENCE_MODELS)}"
        ) from None
