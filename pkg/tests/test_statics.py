import math

import numpy as np
import pytest

from magbike import statics
from magbike.statics import (
    Contact, ContactSet, CornerLoadCase, RobotParams, StaticsDomainError,
    actuator_feasibility, corner_hit_margin, required_adhesion,
    required_moving_torque, required_steering_torque, tip_over_margin,
)


# frozen oracle values, computed by hand before the module existed:
#   5 * 9.81 * 0.035 / 0.11                      = 15.606818181818182
#   2 * 0.03 * (20 + (20 + 9.81) / 0.6)          = 4.181
#   2 * 0.03 * (5 + (30 + 9.81) / 0.6)           = 4.281
#   100 kg*cm = 9.81 N*m ; 32 kg*cm = 3.1392 N*m

def test_required_adhesion_frozen_example():
    got = required_adhesion(9.81, 0.035, 0.11, 5.0)
    assert got == pytest.approx(15.606818181818182, rel=1e-12)
    # theoretical part alone
    assert required_adhesion(9.81, 0.035, 0.11, 1.0) == pytest.approx(3.1213636363636366, rel=1e-12)


def test_required_adhesion_trivial_zeroes():
    assert required_adhesion(0.0, 0.035, 0.11, 5.0) == 0.0
    assert required_adhesion(9.81, 0.0, 0.11, 5.0) == 0.0


def test_required_adhesion_bad_lever():
    with pytest.raises(StaticsDomainError):
        required_adhesion(9.81, 0.035, 0.0, 5.0)


def test_required_moving_torque_frozen_example():
    case = CornerLoadCase(f_edge=20.0, f_wall=20.0, weight=9.81)
    got = required_moving_torque(0.03, case, 0.6, 2.0)
    assert got == pytest.approx(4.181, rel=1e-12)
    assert got < 100 * statics.KGCM_TO_NM  # within the 100 kg*cm motor


def test_required_moving_torque_zero_case():
    assert required_moving_torque(0.03, CornerLoadCase(0, 0, 0), 0.6, 2.0) == 0.0


def test_required_moving_torque_linear_in_sf():
    case = CornerLoadCase(12.0, 7.0, 11.0)
    one = required_moving_torque(0.03, case, 0.6, 1.0)
    two = required_moving_torque(0.03, case, 0.6, 2.0)
    assert two == pytest.approx(2 * one, rel=1e-12)


def test_required_moving_torque_bad_k():
    with pytest.raises(StaticsDomainError):
        required_moving_torque(0.03, CornerLoadCase(1, 1, 1), 0.0, 2.0)


def test_required_steering_torque_frozen_example():
    got = required_steering_torque(0.03, 5.0, 30.0, 9.81, 0.6, 2.0)
    assert got == pytest.approx(4.281, rel=1e-12)
    # the 32 kg*cm servo cannot carry this load case
    assert got > 32 * statics.KGCM_TO_NM


def test_required_steering_torque_zero():
    assert required_steering_torque(0.03, 0.0, 0.0, 0.0, 0.6, 2.0) == 0.0


def test_required_steering_torque_monotone():
    base = required_steering_torque(0.03, 5.0, 30.0, 9.81, 0.6, 2.0)
    assert required_steering_torque(0.03, 6.0, 30.0, 9.81, 0.6, 2.0) > base
    assert required_steering_torque(0.03, 5.0, 31.0, 9.81, 0.6, 2.0) > base
    assert required_steering_torque(0.03, 5.0, 30.0, 10.0, 0.6, 2.0) > base


def test_unit_conversion_kgcm():
    assert 100 * statics.KGCM_TO_NM == pytest.approx(9.81, rel=1e-12)
    assert 32 * statics.KGCM_TO_NM == pytest.approx(3.1392, rel=1e-12)


def test_homogeneity_in_forces():
    rng = np.random.RandomState(11)
    for _ in range(200):
        P, fe, fw, f12, fl = rng.uniform(0.1, 50, size=5)
        r, k, sf = rng.uniform(0.01, 0.1), rng.uniform(0.2, 1.5), rng.uniform(1, 5)
        h, lever = rng.uniform(0.01, 0.1), rng.uniform(0.05, 0.3)
        c = rng.uniform(0.5, 4.0)
        assert required_adhesion(c * P, h, lever, sf) == pytest.approx(
            c * required_adhesion(P, h, lever, sf), rel=1e-12)
        a = required_moving_torque(r, CornerLoadCase(fe, fw, P), k, sf)
        b = required_moving_torque(r, CornerLoadCase(c * fe, c * fw, c * P), k, sf)
        assert b == pytest.approx(c * a, rel=1e-12)
        a = required_steering_torque(r, f12, fl, P, k, sf)
        b = required_steering_torque(r, c * f12, c * fl, c * P, k, sf)
        assert b == pytest.approx(c * a, rel=1e-12)


def test_adhesion_identity_exact():
    rng = np.random.RandomState(5)
    for _ in range(500):
        P, h, lever, sf = rng.uniform(0.01, 100, size=4)
        sf = 1 + sf / 100
        req = required_adhesion(P, h, lever, sf)
        assert req * lever == pytest.approx(sf * P * h, rel=1e-12)


# ---------------------------------------------------------------------------
# tip-over margin

def fig_corner_set(f_hold, lever=0.11, h=0.035, weight=15.696, f_pivot=1e4):
    """Canonical corner-hit contact pair: com at height h over the pivot."""
    return ContactSet(
        contacts=(
            Contact(point=(0, 0, 0), adhesion=f_pivot, normal=(0, 0, 1)),
            Contact(point=(lever, 0, 0), adhesion=f_hold, normal=(0, 0, 1)),
        ),
        com=(0, 0, h), weight=weight)


def test_margin_five_by_construction():
    P, h, lever = 15.696, 0.035, 0.11
    f = 5 * P * h / lever
    assert tip_over_margin(fig_corner_set(f)) == pytest.approx(5.0, rel=1e-12)


def test_margin_one_at_theoretical_minimum():
    P, h, lever = 15.696, 0.035, 0.11
    f = P * h / lever
    assert tip_over_margin(fig_corner_set(f)) == pytest.approx(1.0, rel=1e-12)


def test_margin_single_contact_is_zero():
    cs = ContactSet(contacts=(Contact((0, 0, 0), 10.0, (0, 0, 1)),), com=(0, 0, 0.035), weight=10.0)
    assert tip_over_margin(cs) == 0.0


def test_margin_coincident_contacts_rejected():
    cs = ContactSet(
        contacts=(Contact((0, 0, 0), 10.0, (0, 0, 1)), Contact((0, 0, 0), 10.0, (0, 0, 1))),
        com=(0, 0, 0.035), weight=10.0)
    with pytest.raises(StaticsDomainError):
        tip_over_margin(cs)


def moment_oracle(contact_set):
    """Brute-force cross-product moment sums per pivot, min over pivots."""
    best = math.inf
    pts = contact_set.contacts
    for i, pivot in enumerate(pts):
        restoring = 0.0
        for j, other in enumerate(pts):
            if i == j:
                continue
            moment_vec = np.cross(other.point - pivot.point, -other.adhesion * other.normal)
            restoring += np.linalg.norm(moment_vec)
        lever_vec = contact_set.com - pivot.point
        overturning = contact_set.weight * np.linalg.norm(lever_vec)
        best = min(best, math.inf if overturning == 0 else restoring / overturning)
    return best


def test_margin_matches_cross_product_oracle():
    rng = np.random.RandomState(23)
    for _ in range(300):
        n = rng.randint(2, 5)
        contacts = tuple(
            Contact(point=rng.uniform(-1, 1, 3), adhesion=rng.uniform(0.1, 100),
                    normal=(lambda w: w / np.linalg.norm(w))(rng.normal(size=3)))
            for _ in range(n))
        cs = ContactSet(contacts=contacts, com=rng.uniform(-1, 1, 3),
                        weight=rng.uniform(0.1, 50))
        got = tip_over_margin(cs)
        want = moment_oracle(cs)
        assert got == pytest.approx(want, rel=1e-9)


def test_margin_rigid_transform_invariant():
    rng = np.random.RandomState(31)
    for _ in range(50):
        contacts = tuple(
            Contact(point=rng.uniform(-1, 1, 3), adhesion=rng.uniform(0.1, 100),
                    normal=(lambda w: w / np.linalg.norm(w))(rng.normal(size=3)))
            for _ in range(3))
        cs = ContactSet(contacts=contacts, com=rng.uniform(-1, 1, 3), weight=10.0)
        # random rotation via QR, fixed to det +1
        q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        if np.linalg.det(q) < 0:
            q[:, 0] *= -1
        t = rng.uniform(-5, 5, 3)
        moved = ContactSet(
            contacts=tuple(Contact(q @ c.point + t, c.adhesion, q @ c.normal) for c in contacts),
            com=q @ cs.com + t, weight=cs.weight)
        assert tip_over_margin(moved) == pytest.approx(tip_over_margin(cs), rel=1e-9)


def test_corner_hit_margin_reduces_to_contact_set_margin():
    f, lever, P, h = 27.0, 0.11, 15.696, 0.035
    scalar = corner_hit_margin(f, lever, P, h)
    # large pivot adhesion keeps the pivot-side ratio from governing
    assert scalar == pytest.approx(tip_over_margin(fig_corner_set(f)), rel=1e-12)
    assert scalar == pytest.approx(f * lever / (P * h), rel=1e-12)


# ---------------------------------------------------------------------------
# feasibility report

def test_default_params_pass_nominal_checks():
    report = actuator_feasibility(RobotParams())
    assert report.ok
    by_req = {c.requirement: c for c in report.checks}
    assert by_req["adhesion"].required == pytest.approx(24.970909090909092, rel=1e-12)
    assert by_req["adhesion"].available == 90.0
    assert by_req["moving_torque"].required == pytest.approx(1.5696, rel=1e-12)
    assert by_req["moving_torque"].available == pytest.approx(9.81, rel=1e-12)
    assert by_req["steering_torque"].required == pytest.approx(1.5696, rel=1e-12)
    assert by_req["steering_torque"].available == pytest.approx(3.1392, rel=1e-12)


def test_zero_motor_torque_fails_moving_check():
    with pytest.raises(StaticsDomainError):
        RobotParams(motor_torque=0.0)
    weak = RobotParams(motor_torque=1e-6)
    report = actuator_feasibility(weak)
    moving = [c for c in report.checks if c.requirement == "moving_torque"]
    assert all(not c.ok for c in moving)
    assert not report.ok


def test_empty_worst_cases_gives_nominal_only():
    report = actuator_feasibility(RobotParams(), worst_cases=[])
    assert [c.case for c in report.checks] == ["corner-hit", "nominal-flat", "nominal-flat"]


def test_worst_case_rows_appended():
    case = CornerLoadCase(20.0, 20.0, 9.81, label="corner-90")
    report = actuator_feasibility(RobotParams(), worst_cases=[case])
    rows = [c for c in report.checks if c.case == "corner-90"]
    assert {c.requirement for c in rows} == {"moving_torque", "steering_torque"}
    moving = next(c for c in rows if c.requirement == "moving_torque")
    assert moving.required == pytest.approx(4.181, rel=1e-12)


def test_report_serialization():
    report = actuator_feasibility(RobotParams())
    d = report.to_dict()
    assert d["pass"] is True
    assert {"requirement", "formula", "theoretical", "safety_factor",
            "required", "available", "pass"} <= set(d["checks"][0])
    assert "PASS" in report.to_text()
