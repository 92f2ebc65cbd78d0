import numpy as np

from src.mechanics.kinematics import link_com_jacobian


def inertia_matrix(arm, q):
    """Joint-space inertia M(q) = sum_i m_i Jv_i^T Jv_i + I_i Jw_i^T Jw_i (gravity-free)."""
    M = np.zeros((arm.n_links, arm.n_links))
    for i in range(arm.n_links):
        Jv, Jw = link_com_jacobian(arm, q, i)
        M += arm.link_masses_kg[i] * Jv.T @ Jv + arm.link_inertia(i) * Jw.T @ Jw
    # symmetrize round-off
    return 0.5 * (M + M.T)
