"""Compiled inner loop for long runs. Mirrors the numpy stepping order.

The jitted window function advances sense -> control -> cables -> couples ->
rod for n_steps without leaving machine code. State arrays are mutated in
place; the Python adapter `advance` shuttles them between CoupledSimulation
and the kernel. Agreement with the numpy reference path is pinned by a
cross-check test.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

LAW_CODES = {"none": 0, "sensory-feedback": 1, "reference-tracking": 2, "benchmark": 3}
BC_CODES = {"fixed-fixed": 0, "free-free": 1}

SHEAR_RIGIDITY_FACTOR = 4.0 / 9.0
ACT_CENTER = 40.0
ACT_GAIN = 0.98
ACT_STEEP = 1.0 / 40.0


@njit(cache=True, inline="always", error_model="numpy")
def _sigma(v):
    x = ACT_GAIN * (v - ACT_CENTER)
    if x <= -1.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    return 0.5 * (1.0 + math.tanh(ACT_STEEP * math.atanh(x)))


@njit(cache=True, inline="always", error_model="numpy")
def _sigma_inv(a):
    if a <= 0.0:
        return ACT_CENTER - 1.0 / ACT_GAIN
    if a >= 1.0:
        return ACT_CENTER + 1.0 / ACT_GAIN
    return ACT_CENTER + math.tanh(math.atanh(2.0 * a - 1.0) / ACT_STEEP) / ACT_GAIN


@njit(cache=True, inline="always", error_model="numpy")
def _wrap_angle(x):
    two_pi = 2.0 * math.pi
    a = (x + math.pi) % two_pi
    if a <= 0.0:
        a += two_pi
    return a - math.pi


@njit(cache=True, error_model="numpy")
def run_window(
    n_steps,
    # state (mutated)
    r, v, theta, omega, Vt, Wt, Vb, Wb, i_top, i_bottom, u_net,
    # grid and sections
    n, ds, dt, s, EI, c_max, EA_e, GA_e, rhoI_e, zrot_e, mass, trib, zeta,
    # drag
    drag_ct, drag_cn, drag_quad,
    # cables
    neural_on, tau, tau_a, lam2, b_adapt, bc_code, v0t, vLt, v0b, vLb,
    # control
    law, mu, mu_star, beta, eps, cap, tx, ty,
    u_ext,
):
    n_nodes = n + 1
    phi = np.empty(n_nodes)
    alpha = np.empty(n_nodes)
    m_nodes = np.empty(n_nodes)
    lap = np.empty(n_nodes)
    vr_t = np.empty(n_nodes)
    vr_b = np.empty(n_nodes)
    d2t = np.empty(n_nodes)
    d2b = np.empty(n_nodes)
    fx = np.empty(n)
    fy = np.empty(n)
    thx = np.empty(n)
    thy = np.empty(n)
    g_row = np.empty(n)
    d_row = np.empty(n)
    o_row = np.empty(n - 1)
    lam_row = np.empty(n)
    inv_w = np.empty(n_nodes)
    for i in range(n_nodes):
        inv_w[i] = 1.0 / mass[i]
    inv_w[0] = 0.0

    for _step in range(n_steps):
        # ---- node angles and sensing
        phi[0] = theta[0]
        phi[n] = theta[n - 1]
        for j in range(1, n):
            phi[j] = 0.5 * (theta[j] + theta[j - 1])

        if law != 0:
            best = 1.0e300
            sbar_idx = 0
            for i in range(n_nodes):
                dx = tx - r[i, 0]
                dy = ty - r[i, 1]
                d2 = dx * dx + dy * dy
                if d2 <= best:
                    best = d2
                    sbar_idx = i
                alpha[i] = _wrap_angle(math.atan2(dy, dx) - phi[i])
            sbar = sbar_idx * ds

            if law == 1:
                for i in range(n_nodes):
                    if s[i] <= sbar:
                        cur = -mu * math.sin(alpha[i])
                    else:
                        cur = 0.0
                    if cur <= 0.0:
                        i_top[i] = -cur
                        i_bottom[i] = 0.0
                    else:
                        i_top[i] = 0.0
                        i_bottom[i] = cur
            elif law == 2 or law == 3:
                for i in range(n_nodes):
                    if s[i] <= sbar:
                        u_star = -mu_star * math.sin(alpha[i])
                    else:
                        u_star = 0.0
                    if u_star > c_max[i]:
                        u_star = c_max[i]
                    elif u_star < -c_max[i]:
                        u_star = -c_max[i]
                    if law == 3:
                        u_net[i] = u_star
                    else:
                        ratio = u_star / c_max[i]
                        vb_b = ratio if ratio > 0.0 else 0.0
                        vb_t = -ratio if ratio < 0.0 else 0.0
                        if vb_b < eps:
                            vb_b = eps
                        elif vb_b > 1.0 - eps:
                            vb_b = 1.0 - eps
                        if vb_t < eps:
                            vb_t = eps
                        elif vb_t > 1.0 - eps:
                            vb_t = 1.0 - eps
                        vr_t[i] = _sigma_inv(vb_t)
                        vr_b[i] = _sigma_inv(vb_b)
                if law == 2:
                    for i in range(1, n):
                        d2t[i] = (vr_t[i + 1] - 2.0 * vr_t[i] + vr_t[i - 1]) / (ds * ds)
                        d2b[i] = (vr_b[i + 1] - 2.0 * vr_b[i] + vr_b[i - 1]) / (ds * ds)
                    d2t[0] = (2.0 * vr_t[0] - 5.0 * vr_t[1] + 4.0 * vr_t[2] - vr_t[3]) / (ds * ds)
                    d2t[n] = (2.0 * vr_t[n] - 5.0 * vr_t[n - 1] + 4.0 * vr_t[n - 2] - vr_t[n - 3]) / (ds * ds)
                    d2b[0] = (2.0 * vr_b[0] - 5.0 * vr_b[1] + 4.0 * vr_b[2] - vr_b[3]) / (ds * ds)
                    d2b[n] = (2.0 * vr_b[n] - 5.0 * vr_b[n - 1] + 4.0 * vr_b[n - 2] - vr_b[n - 3]) / (ds * ds)
                    for i in range(n_nodes):
                        gt = Vt[i] if Vt[i] > 0.0 else 0.0
                        gb = Vb[i] if Vb[i] > 0.0 else 0.0
                        it = b_adapt * gt + (1.0 - beta) * Vt[i] + beta * vr_t[i] - lam2 * d2t[i]
                        ib = b_adapt * gb + (1.0 - beta) * Vb[i] + beta * vr_b[i] - lam2 * d2b[i]
                        if it > cap:
                            it = cap
                        elif it < -cap:
                            it = -cap
                        if ib > cap:
                            ib = cap
                        elif ib < -cap:
                            ib = -cap
                        i_top[i] = it
                        i_bottom[i] = ib

        # ---- cables
        if law != 3 and neural_on:
            for cable in range(2):
                V = Vt if cable == 0 else Vb
                W = Wt if cable == 0 else Wb
                I = i_top if cable == 0 else i_bottom
                for i in range(1, n):
                    lap[i] = (V[i + 1] - 2.0 * V[i] + V[i - 1]) / (ds * ds)
                if bc_code == 1:
                    lap[0] = 2.0 * (V[1] - V[0]) / (ds * ds)
                    lap[n] = 2.0 * (V[n - 1] - V[n]) / (ds * ds)
                else:
                    lap[0] = 0.0
                    lap[n] = 0.0
                for i in range(n_nodes):
                    gV = V[i] if V[i] > 0.0 else 0.0
                    Vn = V[i] + (dt / tau) * (lam2 * lap[i] - V[i] - W[i] + I[i])
                    W[i] = W[i] + (dt / tau_a) * (-W[i] + b_adapt * gV)
                    V[i] = Vn
                if bc_code == 0:
                    if cable == 0:
                        V[0] = v0t
                        V[n] = vLt
                    else:
                        V[0] = v0b
                        V[n] = vLb
            for i in range(n_nodes):
                u_net[i] = c_max[i] * (_sigma(Vb[i]) - _sigma(Vt[i])) + u_ext[i]
        elif law != 3 and not neural_on:
            for i in range(n_nodes):
                u_net[i] = u_ext[i]

        # ---- rod: element loads
        for j in range(n):
            ct = math.cos(theta[j])
            st = math.sin(theta[j])
            thx[j] = ct
            thy[j] = st
            sx = (r[j + 1, 0] - r[j, 0]) / ds
            sy = (r[j + 1, 1] - r[j, 1]) / ds
            nu1 = sx * ct + sy * st
            nu2 = -sx * st + sy * ct
            n1 = EA_e[j] * (nu1 - 1.0)
            n2 = GA_e[j] * nu2
            fx[j] = n1 * ct - n2 * st
            fy[j] = n1 * st + n2 * ct
            g_row[j] = n2  # reuse as shear store for the torque below

        for i in range(1, n):
            m_nodes[i] = EI[i] * (theta[i] - theta[i - 1]) / ds + u_net[i]
        m_nodes[n] = 0.0

        for j in range(1, n):
            torque = (m_nodes[j + 1] - m_nodes[j]) / ds + g_row[j]
            omega[j] = (omega[j] + dt * torque / rhoI_e[j]) / (1.0 + dt * zrot_e[j] / rhoI_e[j])
        omega[0] = 0.0

        # ---- rod: node forces, drag, kick
        for i in range(1, n_nodes):
            nfx = -fx[i - 1]
            nfy = -fy[i - 1]
            if i < n:
                nfx += fx[i]
                nfy += fy[i]
            if drag_ct != 0.0 or drag_cn != 0.0:
                ca = math.cos(phi[i])
                sa = math.sin(phi[i])
                vt_ = v[i, 0] * ca + v[i, 1] * sa
                vn_ = -v[i, 0] * sa + v[i, 1] * ca
                if drag_quad:
                    ft = -drag_ct * abs(vt_) * vt_
                    fn = -drag_cn * abs(vn_) * vn_
                else:
                    ft = -drag_ct * vt_
                    fn = -drag_cn * vn_
                nfx += (ft * ca - fn * sa) * trib[i]
                nfy += (ft * sa + fn * ca) * trib[i]
            damp = 1.0 + dt * zeta * trib[i] / mass[i]
            v[i, 0] = (v[i, 0] + dt * nfx / mass[i]) / damp
            v[i, 1] = (v[i, 1] + dt * nfy / mass[i]) / damp
        v[0, 0] = 0.0
        v[0, 1] = 0.0

        # ---- velocity projection onto zero stretch rate (Thomas solve)
        for j in range(n):
            dx = r[j + 1, 0] - r[j, 0]
            dy = r[j + 1, 1] - r[j, 1]
            ln = math.sqrt(dx * dx + dy * dy)
            thx[j] = dx / ln
            thy[j] = dy / ln
            g_row[j] = (v[j + 1, 0] - v[j, 0]) * thx[j] + (v[j + 1, 1] - v[j, 1]) * thy[j]
            d_row[j] = inv_w[j] + inv_w[j + 1]
        for j in range(n - 1):
            o_row[j] = -inv_w[j + 1] * (thx[j] * thx[j + 1] + thy[j] * thy[j + 1])
        # forward elimination on the symmetric tridiagonal system
        lam_row[0] = -g_row[0]
        for j in range(1, n):
            mfac = o_row[j - 1] / d_row[j - 1]
            d_row[j] = d_row[j] - mfac * o_row[j - 1]
            lam_row[j] = -g_row[j] - mfac * lam_row[j - 1]
        lam_row[n - 1] = lam_row[n - 1] / d_row[n - 1]
        for j in range(n - 2, -1, -1):
            lam_row[j] = (lam_row[j] - o_row[j] * lam_row[j + 1]) / d_row[j]
        for i in range(1, n_nodes):
            dvx = 0.0
            dvy = 0.0
            if i < n:
                dvx -= lam_row[i] * thx[i]
                dvy -= lam_row[i] * thy[i]
            dvx += lam_row[i - 1] * thx[i - 1]
            dvy += lam_row[i - 1] * thy[i - 1]
            v[i, 0] += inv_w[i] * dvx
            v[i, 1] += inv_w[i] * dvy

        # ---- drift and position projection
        for j in range(1, n):
            theta[j] += dt * omega[j]
        theta[0] = 0.0
        for i in range(1, n_nodes):
            r[i, 0] += dt * v[i, 0]
            r[i, 1] += dt * v[i, 1]
        old_x = 0.0
        old_y = 0.0
        new_x = 0.0
        new_y = 0.0
        for j in range(n):
            dx = r[j + 1, 0] - old_x
            dy = r[j + 1, 1] - old_y
            ln = math.sqrt(dx * dx + dy * dy)
            old_x = r[j + 1, 0]
            old_y = r[j + 1, 1]
            new_x += ds * dx / ln
            new_y += ds * dy / ln
            r[j + 1, 0] = new_x
            r[j + 1, 1] = new_y

    return 0


@njit(cache=True, error_model="numpy")
def cable_window(
    V, W, I_const, tracking, ref_field, beta, cap,
    n, ds, dt, tau, tau_a, lam2, b_adapt, bc_code, v0, vL, n_steps,
):
    """Advance one cable n_steps under constant current or tracking feedback.

    In tracking mode the applied current is b*g(V) + (1-beta)*V + ref_field,
    where ref_field = beta*sigma_inv(v_bar) - lam^2 (sigma_inv(v_bar))_ss is
    precomputed for a constant reference; the total is capped to +-cap.
    Returns the max rate max(|dV/dt|, |dW/dt|) [mV/s] of the last step.
    """
    n_nodes = n + 1
    lap = np.empty(n_nodes)
    cur = np.empty(n_nodes)
    residual = 0.0
    for _step in range(n_steps):
        for i in range(1, n):
            lap[i] = (V[i + 1] - 2.0 * V[i] + V[i - 1]) / (ds * ds)
        if bc_code == 1:
            lap[0] = 2.0 * (V[1] - V[0]) / (ds * ds)
            lap[n] = 2.0 * (V[n - 1] - V[n]) / (ds * ds)
        else:
            lap[0] = 0.0
            lap[n] = 0.0
        if tracking:
            for i in range(n_nodes):
                gV = V[i] if V[i] > 0.0 else 0.0
                c = b_adapt * gV + (1.0 - beta) * V[i] + ref_field[i]
                if c > cap:
                    c = cap
                elif c < -cap:
                    c = -cap
                cur[i] = c
        else:
            for i in range(n_nodes):
                cur[i] = I_const[i]
        residual = 0.0
        for i in range(n_nodes):
            gV = V[i] if V[i] > 0.0 else 0.0
            dV = (lam2 * lap[i] - V[i] - W[i] + cur[i]) / tau
            dW = (-W[i] + b_adapt * gV) / tau_a
            if bc_code == 0 and (i == 0 or i == n):
                dV = 0.0
            V[i] = V[i] + dt * dV
            W[i] = W[i] + dt * dW
            if abs(dV) > residual:
                residual = abs(dV)
            if abs(dW) > residual:
                residual = abs(dW)
        if bc_code == 0:
            V[0] = v0
            V[n] = vL
    return residual


def advance(sim, n_steps: int) -> None:
    """Advance a CoupledSimulation by n_steps via the compiled window."""
    geom = sim.geometry
    n = geom.n
    A_e = 0.5 * (geom.A[1:] + geom.A[:-1])
    I_e = 0.5 * (geom.I[1:] + geom.I[:-1])
    from .rod import node_masses

    mass = node_masses(geom)
    trib = np.full(n + 1, geom.ds)
    trib[0] = trib[-1] = 0.5 * geom.ds
    run_window(
        n_steps,
        sim.rod.r, sim.rod.r_t, sim.rod.theta, sim.rod.theta_t,
        sim.top.V, sim.top.W, sim.bottom.V, sim.bottom.W,
        sim.i_top, sim.i_bottom, sim.u_net,
        n, geom.ds, sim.dt, geom.s, geom.EI, geom.c,
        geom.E * A_e, SHEAR_RIGIDITY_FACTOR * geom.E * A_e,
        geom.rho * I_e, np.full(n, geom.zeta_rot), mass, trib, geom.zeta_per_length,
        sim.drag.c_tangential, sim.drag.c_normal, sim.drag.mode == "quadratic",
        sim.neural, sim.cable_params.tau, sim.cable_params.tau_adapt,
        sim.cable_params.lam**2, sim.cable_params.b,
        BC_CODES[sim.bc_top.kind],
        sim.bc_top.v0, sim.bc_top.vL,
        sim.bc_bottom.v0, sim.bc_bottom.vL,
        LAW_CODES[sim.law], sim.control.mu, sim.control.mu_star,
        sim.control.beta, sim.control.epsilon, sim.control.current_cap,
        float(sim.target[0]), float(sim.target[1]),
        sim.u_external,
    )
    sim.t += n_steps * sim.dt
    sim.steps += n_steps
