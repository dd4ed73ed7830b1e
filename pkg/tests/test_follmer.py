"""Compensated sums, remainder kernels, quotient measures, and the bundled
time / multi-component / functional identities."""

import math

import numpy as np
import pytest

from fracpath.errors import (
    InsufficientDerivativesError,
    InvalidParameterError,
    KernelSingularError,
)
from fracpath.experiments import (
    bump_decomposition,
    bump_direct_stage,
    bump_limit_value,
    cantor_compensated_formula,
    cantor_stage,
)
from fracpath.follmer import (
    FunctionalBundle,
    PrefixFamily,
    TensorFunctionBundle,
    TimeFunctionBundle,
    bump_atom_weights,
    compensated_sum,
    ito_check,
    ito_check_functional,
    ito_check_multi,
    ito_check_time,
    kernel_profile,
    quotient_measure,
    remainder_integral,
    remainder_kernel,
    young_bound_check,
)
from fracpath.partitions import Partition, badic, value_grid_partition
from fracpath.paths import SampledPath, cantor_bump_knots
from fracpath.registry import abs_power, moving_abs_power, polynomial, product_bundle, sin_affine
from fracpath.variation import pth_variation_partial

P = 2.5

# --------------------------------------------------------------------------- #
# compensated sum and the stage identity
# --------------------------------------------------------------------------- #


def test_identity_residual_rounding_level(cantor8):
    path, part, _ = cantor8
    rep = ito_check(abs_power(P), path, part, P)
    assert abs(rep.identity_residual) < 1e-13
    # start and end values coincide, so kernel and compensated parts cancel
    assert rep.value_change == 0.0
    assert rep.kernel_sum == pytest.approx(-rep.compensated, abs=1e-13)


def test_compensated_closed_form():
    # frozen stage values; the closed form reproduces the sum bitwise-tight
    for n, frozen in ((4, -0.23667478527522334), (8, -0.087688576589700418)):
        stage = cantor_stage(P, n)
        assert stage.compensated == pytest.approx(stage.compensated_formula, abs=5e-15)
        assert stage.compensated_formula == pytest.approx(frozen, rel=1e-15)
    assert cantor_compensated_formula(P, 4, 2) == pytest.approx(-0.23667478527522334, rel=1e-15)


def test_compensated_sum_contracts(cantor8):
    path, part, _ = cantor8
    fn = abs_power(P)
    direct = compensated_sum(fn, path, part, 2)
    rep = ito_check(fn, path, part, P)
    assert direct == rep.compensated
    with pytest.raises(InvalidParameterError):
        compensated_sum(fn, path, part, 0)
    from fracpath.fracops import SmoothFn

    with pytest.raises(InsufficientDerivativesError):
        compensated_sum(SmoothFn(fn=np.sin), path, part, 1)


def test_ito_check_rejects_small_p(cantor8):
    path, part, _ = cantor8
    with pytest.raises(InvalidParameterError):
        ito_check(abs_power(P), path, part, 1.0)


# --------------------------------------------------------------------------- #
# remainder kernel
# --------------------------------------------------------------------------- #


def test_kernel_pure_power_reference():
    fn = abs_power(P)
    # G(0, 1) = 1 for f = |x|^p: the Taylor part vanishes at the origin
    assert remainder_kernel(fn, P, 0.0, 1.0) == pytest.approx(1.0, abs=1e-12)
    # p-homogeneous f makes G scale-invariant
    g1 = remainder_kernel(fn, P, 0.3, 0.7)
    g2 = remainder_kernel(fn, P, 0.6, 1.4)
    assert g1 == pytest.approx(g2, rel=1e-10)


def test_kernel_smooth_and_diagonal():
    # m = 2 and constant second derivative: the integrand vanishes identically
    smooth = polynomial([0.3, 2.0, 1.5])
    assert abs(remainder_kernel(smooth, P, -0.4, 0.9)) < 1e-12
    assert remainder_kernel(smooth, P, 0.5, 0.5) == 0.0
    with pytest.raises(KernelSingularError):
        remainder_kernel(abs_power(P), P, 0.0, 0.0)
    with pytest.raises(InvalidParameterError):
        remainder_kernel(smooth, 0.9, 0.0, 1.0)


def test_kernel_profile_axis_and_methods():
    fn = abs_power(2.25)
    thetas = np.array([np.pi / 2, 0.35, 1.1, 2.4, 4.0])
    fast = kernel_profile(fn, 2.25, thetas)
    slow = kernel_profile(fn, 2.25, thetas, method="integral")
    # the axis angle hits (a, b) = (0, 1) exactly: G = 1 for a pure power
    assert fast[0] == 1.0
    assert np.allclose(fast, slow, rtol=1e-7, atol=1e-9)
    with pytest.raises(InvalidParameterError):
        kernel_profile(fn, 2.25, thetas, method="midpoint")


# --------------------------------------------------------------------------- #
# quotient measure
# --------------------------------------------------------------------------- #


def test_quotient_measure_mass_identity(cantor8):
    path, part, _ = cantor8
    atoms = quotient_measure(path, part, P)
    assert atoms.mass == pth_variation_partial(path, part, P)
    assert atoms.angles.size == atoms.weights.size == atoms.times.size


def test_quotient_measure_drops_zero_increments():
    path = SampledPath(np.array([0.0, 0.25, 0.5, 1.0]), np.array([0.0, 0.5, 0.5, 0.2]))
    atoms = quotient_measure(path, Partition(path.times), 2.0)
    assert atoms.dropped_zero == 1
    assert atoms.weights.size == 2


def test_quotient_measure_dyadic_scale_invariance(hand_path):
    part = Partition(hand_path.times)
    base = quotient_measure(hand_path, part, 2.0)
    doubled = quotient_measure(
        SampledPath(hand_path.times, 4.0 * hand_path.values), part, 2.0
    )
    # atan2 of both coordinates scaled by a power of two: bitwise identical
    assert np.array_equal(base.angles, doubled.angles)


# --------------------------------------------------------------------------- #
# bump path: finite stages, atoms, limit
# --------------------------------------------------------------------------- #


def test_bump_atom_weights_closed_form():
    p = 2.25
    table = bump_atom_weights(p, 7)
    c = (2.0 ** (p - 1.0) - 1.0) / (2.0**p - 1.0)
    want = c * np.array([1.0] + [2.0 ** (-math.ceil(math.log2(k + 1)) * p) for k in range(1, 8)])
    assert np.allclose(table.weights, want, rtol=1e-15)
    # the full ladder carries unit mass; a long truncation gets close
    big = bump_atom_weights(p, 4000)
    assert 0.999 < big.mass <= 1.0 + 1e-12
    with pytest.raises(InvalidParameterError):
        bump_atom_weights(3.2, 5)


def test_bump_decomposition_stage_numbers():
    p = 2.25
    rep = bump_decomposition(p, 10)
    assert rep.compensated < 0.0
    # the kernel sum rebuilt from finite-stage atoms is the compensated sum
    # with its sign flipped (the path starts and ends at zero)
    assert rep.kernel_from_atoms == pytest.approx(-rep.compensated, abs=1e-12)
    assert rep.kernel_from_limit == pytest.approx(-rep.compensated, abs=1e-3)
    # frozen leading atom weight, finite stage vs limit table
    assert rep.atom_weights[0] == pytest.approx(0.36685476739591794, rel=1e-14)
    assert rep.atom_weights_limit[0] == pytest.approx(0.36690901505826234, rel=1e-14)
    with pytest.raises(InvalidParameterError):
        bump_decomposition(1.9, 4)
    with pytest.raises(InvalidParameterError):
        bump_decomposition(p, 0)


def test_bump_direct_stage_matches_decomposition():
    # materialize the stage-5 path and let the generic machinery loose on it
    p, n = 2.25, 5
    knots = cantor_bump_knots(p, n)
    part = value_grid_partition(knots, 2.0**-n, mode="increment")
    rep, atoms = bump_direct_stage(p, n, knots, part)
    dec = bump_decomposition(p, n)
    assert rep.compensated == pytest.approx(dec.compensated, abs=1e-12)
    assert atoms.mass == pytest.approx(2.0 * float(np.sum(dec.atom_weights)), abs=1e-12)
    assert abs(rep.identity_residual) < 1e-13


def test_bump_limit_reference_level():
    # the closed reference level is negative on (2, 3) and dominates the
    # (more negative) finite stages from below zero
    ref = bump_limit_value(2.25)
    assert ref == pytest.approx(-0.10866596106996423, rel=1e-15)
    rep = bump_decomposition(2.25, 10)
    assert rep.compensated < ref < 0.0


def test_remainder_integral_matches_limit_kernel():
    p = 2.25
    rep = bump_decomposition(p, 8)
    table = bump_atom_weights(p, 2**7 - 1)
    angles, weights = table.flat()
    got = remainder_integral(abs_power(p), p, angles, weights)
    assert got == pytest.approx(rep.kernel_from_limit, rel=1e-12)


# --------------------------------------------------------------------------- #
# time-dependent identity
# --------------------------------------------------------------------------- #


def test_time_bundle_cylinder_reduction(fbm04):
    part = badic(1.0, 10)
    plain = ito_check(abs_power(P), fbm04, part, P)
    fn = abs_power(P)
    asbundle = TimeFunctionBundle(
        fn=lambda t, x: fn.fn(x),
        dt=lambda t, x: np.zeros_like(np.asarray(x, dtype=float)),
        dx=(lambda t, x: fn.derivs[0](x), lambda t, x: fn.derivs[1](x)),
    )
    rep = ito_check_time(asbundle, fbm04, part, P)
    assert rep.compensated == pytest.approx(plain.compensated, abs=1e-13)
    assert rep.follmer_residual == pytest.approx(plain.follmer_residual, abs=1e-13)
    assert rep.time_integral == 0.0


def test_time_bundle_pure_time(fbm04):
    only_t = TimeFunctionBundle(
        fn=lambda t, x: np.asarray(t, dtype=float),
        dt=lambda t, x: np.ones_like(np.asarray(t, dtype=float)),
        dx=(
            lambda t, x: np.zeros_like(np.asarray(x, dtype=float)),
            lambda t, x: np.zeros_like(np.asarray(x, dtype=float)),
        ),
    )
    rep = ito_check_time(only_t, fbm04, badic(1.0, 8), P)
    # the time differences telescope to the horizon with nothing left over
    assert rep.follmer_residual == 0.0
    assert rep.time_integral == pytest.approx(1.0, abs=1e-13)


def test_time_bundle_moving_kink(fbm04):
    rep = ito_check_time(moving_abs_power(P, speed=0.3), fbm04, badic(1.0, 12), P)
    assert abs(rep.identity_residual) < 1e-12
    assert rep.time_quadrature_gap < 1e-12
    assert abs(rep.follmer_residual) < 0.02


def test_time_bundle_needs_space_derivatives(fbm04):
    lame = TimeFunctionBundle(
        fn=lambda t, x: np.asarray(x, dtype=float),
        dt=lambda t, x: np.zeros_like(np.asarray(t, dtype=float)),
        dx=(lambda t, x: np.ones_like(np.asarray(x, dtype=float)),),
    )
    with pytest.raises(InsufficientDerivativesError):
        ito_check_time(lame, fbm04, badic(1.0, 6), P)


# --------------------------------------------------------------------------- #
# multi-component identity
# --------------------------------------------------------------------------- #


def test_multi_reduces_to_scalar(fbm04):
    part = badic(1.0, 10)
    square = ito_check(polynomial([0.0, 0.0, 1.0]), fbm04, part, P)
    # f(x, y) = x y evaluated on the diagonal pair (S, S) is f(x) = x^2
    rep = ito_check_multi(product_bundle(), [fbm04, fbm04], part, P)
    assert rep.compensated == pytest.approx(square.compensated, abs=1e-12)
    assert rep.value_change == pytest.approx(square.value_change, abs=1e-14)


def test_multi_linear_is_exact(fbm04, fbm08):
    grid = badic(1.0, 10)
    a = SampledPath(grid.times, fbm04.value_at(grid.times))
    b = SampledPath(grid.times, fbm08.value_at(grid.times))
    lin = TensorFunctionBundle(
        fn=lambda v: np.asarray(v, dtype=float).sum(axis=-1),
        grad=lambda v: np.ones_like(np.asarray(v, dtype=float)),
        hess=lambda v: np.zeros(np.asarray(v, dtype=float).shape[:-1] + (2, 2)),
    )
    rep = ito_check_multi(lin, [a, b], grid, P)
    assert abs(rep.follmer_residual) < 1e-12
    assert abs(rep.kernel_sum) < 1e-12


def test_multi_needs_hessian(fbm04):
    nohess = TensorFunctionBundle(
        fn=lambda v: np.asarray(v, dtype=float).prod(axis=-1),
        grad=lambda v: np.asarray(v, dtype=float)[..., ::-1].copy(),
    )
    with pytest.raises(InsufficientDerivativesError):
        ito_check_multi(nohess, [fbm04, fbm04], badic(1.0, 6), P)


# --------------------------------------------------------------------------- #
# functional identity
# --------------------------------------------------------------------------- #


def test_functional_cylinder_reduction(fbm04):
    part = badic(1.0, 10)
    fn = abs_power(P)
    cyl = FunctionalBundle(
        evaluate=lambda pre: float(fn.fn(np.asarray(pre.current))),
        vertical=(
            lambda pre: float(fn.derivs[0](np.asarray(pre.current))),
            lambda pre: float(fn.derivs[1](np.asarray(pre.current))),
        ),
        name="cylinder",
    )
    rep = ito_check_functional(cyl, fbm04, part, P)
    plain = ito_check(fn, fbm04, part, P)
    assert rep.compensated == pytest.approx(plain.compensated, abs=1e-12)
    assert rep.follmer_residual == pytest.approx(plain.follmer_residual, abs=1e-12)


def test_functional_running_integral(fbm04):
    part = badic(1.0, 10)
    # F = integral of the path: horizontal steps carry everything, and the
    # vertical expansion sees a locally constant functional
    area = FunctionalBundle(
        evaluate=lambda pre: pre.integral(),
        vertical=(lambda pre: 0.0, lambda pre: 0.0),
        name="area",
    )
    rep = ito_check_functional(area, fbm04, part, P)
    assert rep.follmer_residual == pytest.approx(0.0, abs=1e-14)


def test_functional_product_with_endpoint(fbm04):
    part = badic(1.0, 10)

    # bump sensitivity at an extended prefix: the flat extension of length L
    # carries the bumped value, so d/db [I(b) c(b)] = I + L c and d2 = 2 L
    def ext_len(pre):
        return pre.end_time - float(pre.family.times[pre.j])

    prod = FunctionalBundle(
        evaluate=lambda pre: pre.integral() * pre.current,
        vertical=(
            lambda pre: pre.integral() + ext_len(pre) * pre.current,
            lambda pre: 2.0 * ext_len(pre),
        ),
        name="area-times-endpoint",
    )
    rep = ito_check_functional(prod, fbm04, part, P)
    assert abs(rep.identity_residual) < 1e-12
    assert abs(rep.follmer_residual) < 0.05
    # the functional is quadratic in the bump, so centered differences are
    # exact and the fd fallback must agree to rounding
    fd = FunctionalBundle(evaluate=lambda pre: pre.integral() * pre.current)
    rep_fd = ito_check_functional(fd, fbm04, part, P)
    assert rep_fd.compensated == pytest.approx(rep.compensated, abs=1e-9)


def test_prefix_family_mechanics(fbm04):
    part = badic(1.0, 6)
    fam = PrefixFamily(fbm04, part, mode="step")
    vals = fbm04.value_at(part.times)
    dt = np.diff(part.times)
    j = 17
    assert fam.prefix(j).integral() == pytest.approx(float(np.sum(vals[:j] * dt[:j])), abs=1e-14)
    assert fam.prefix(j).current == pytest.approx(float(vals[j]))
    bumped = fam.prefix(j, bump=0.25)
    assert bumped.current == pytest.approx(float(vals[j]) + 0.25)
    stretched = fam.prefix(j, extend_to=part.times[j] + 0.1)
    assert stretched.integral() == pytest.approx(
        fam.prefix(j).integral() + 0.1 * float(vals[j]), abs=1e-14
    )
    lin = PrefixFamily(fbm04, part, mode="linear")
    assert lin.prefix(part.times.size - 1).integral() == pytest.approx(
        float(np.trapezoid(vals, part.times)), abs=1e-14
    )
    with pytest.raises(InvalidParameterError):
        fam.prefix(part.times.size)
    with pytest.raises(InvalidParameterError):
        fam.prefix(j, extend_to=part.times[j] - 0.5)
    with pytest.raises(InvalidParameterError):
        PrefixFamily(fbm04, part, mode="spline")


# --------------------------------------------------------------------------- #
# product bound for mixed variation
# --------------------------------------------------------------------------- #


def test_young_bound_single_path_is_equality(fbm04):
    rep = young_bound_check([fbm04], [P], [badic(1.0, j) for j in (6, 8, 10)])
    assert rep.all_ok
    assert all(m == 0.0 for m in rep.margins)


def test_young_bound_pair(fbm04, fbm08):
    grid = [badic(1.0, j) for j in (6, 8, 10)]
    a = SampledPath(grid[-1].times, fbm04.value_at(grid[-1].times))
    b = SampledPath(grid[-1].times, fbm08.value_at(grid[-1].times))
    rep = young_bound_check([a, b], [1.25, 1.25], grid)
    assert rep.all_ok
    assert rep.p == pytest.approx(2.5)
    # perfectly anticorrelated components still satisfy the bound
    anti = SampledPath(a.times, -a.values)
    rep2 = young_bound_check([a, anti], [1.0, 1.5], grid)
    assert rep2.all_ok


def test_young_bound_validation(fbm04):
    grid = [badic(1.0, 6)]
    with pytest.raises(InvalidParameterError):
        young_bound_check([fbm04], [1.0, 1.0], grid)
    with pytest.raises(InvalidParameterError):
        young_bound_check([fbm04], [-1.0], grid)
