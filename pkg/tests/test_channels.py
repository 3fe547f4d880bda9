import numpy as np
import pytest

from rdmap import linalg
from rdmap.channels import (
    MeasurementPartition,
    QuantumChannel,
    certify_rdm,
    cyclic_twirl,
    dephasing_map,
    lueders_map,
    map_from_json,
    map_to_json,
    mixing_map,
    modified_coarse_map,
    twirling_map,
)
from rdmap.errors import (
    DimensionMismatch,
    NotAGroup,
    NotFineGrained,
    NotIdempotent,
    NotUnitary,
    ValidationError,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def superop_distance(A, B) -> float:
    return float(np.linalg.norm(A.superop - B.superop))


# ---------------------------------------------------------------- partitions

def test_partition_validates_cover():
    p = MeasurementPartition(3, [[2], [0, 1]])
    assert p.blocks == ((2,), (0, 1))
    assert p.degeneracies == (1, 2)
    with pytest.raises(ValidationError):
        MeasurementPartition(3, [[0, 1], [1, 2]])
    with pytest.raises(ValidationError):
        MeasurementPartition(3, [[0], [1]])
    with pytest.raises(ValidationError):
        MeasurementPartition(2, [[0], [], [1]])


def test_partition_helpers():
    assert MeasurementPartition.singletons(3).is_fine_grained()
    assert MeasurementPartition.single_block(3).degeneracies == (3,)
    L = MeasurementPartition(3, [[0, 1], [2]]).projectors()
    assert np.allclose(L[0], np.diag([1.0, 1.0, 0.0]))
    assert np.allclose(L[1], np.diag([0.0, 0.0, 1.0]))


# ------------------------------------------------------------------ channels

def test_apply_identity_channel():
    ident = QuantumChannel([np.eye(2)])
    rho = linalg.random_density_matrix(2, 2, seed=0)
    assert np.allclose(ident.apply(rho), rho, atol=1e-14)


def test_apply_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        dephasing_map(MeasurementPartition.singletons(2)).apply(np.eye(3) / 3)


def test_apply_output_is_a_density_matrix():
    for seed in range(5):
        rho = linalg.random_density_matrix(3, 3, seed=seed)
        for rdm in (dephasing_map(MeasurementPartition.singletons(3)),
                    lueders_map(MeasurementPartition(3, [[0, 1], [2]])),
                    cyclic_twirl(3), mixing_map(3)):
            linalg.validate_density(rdm.apply(rho))


def test_dephasing_erases_off_diagonals():
    deph = dephasing_map(MeasurementPartition.singletons(2))
    out = deph.apply(np.full((2, 2), 0.5, dtype=complex))
    assert np.allclose(out, np.eye(2) / 2, atol=1e-14)
    diag = np.diag([0.7, 0.3]).astype(complex)
    assert np.allclose(deph.apply(diag), diag, atol=1e-14)


def test_dephasing_requires_singletons():
    with pytest.raises(NotFineGrained):
        dephasing_map(MeasurementPartition(3, [[0, 1], [2]]))


def test_twirl_ix_averages():
    tw = twirling_map([np.eye(2), X])
    out = tw.apply(np.diag([1.0, 0.0]).astype(complex))
    assert np.allclose(out, np.eye(2) / 2, atol=1e-14)


def test_twirl_iz_is_dephasing():
    # same channel in a different Kraus presentation
    tw = twirling_map([np.eye(2), Z])
    deph = dephasing_map(MeasurementPartition.singletons(2))
    assert superop_distance(tw, deph) <= 1e-10


def test_twirl_rejects_non_unitary():
    with pytest.raises(NotUnitary):
        twirling_map([np.eye(2), np.diag([1.0, 0.5])])


def test_twirl_rejects_non_group():
    # {I, C} with C the 3-cycle: missing C^2
    C = np.roll(np.eye(3), 1, axis=0)
    with pytest.raises(NotAGroup):
        twirling_map([np.eye(3), C])


def test_twirl_accepts_group_up_to_phase():
    # phases are invisible at the channel level
    tw = twirling_map([np.eye(2), 1j * Z])
    deph = dephasing_map(MeasurementPartition.singletons(2))
    assert superop_distance(tw, deph) <= 1e-10


def test_lueders_keeps_blocks():
    part = MeasurementPartition(3, [[0, 1], [2]])
    out = lueders_map(part).apply(np.full((3, 3), 1 / 3, dtype=complex))
    want = np.array([[1, 1, 0], [1, 1, 0], [0, 0, 1]]) / 3
    assert np.allclose(out, want, atol=1e-14)


def test_lueders_single_block_is_identity():
    lued = lueders_map(MeasurementPartition.single_block(3))
    rho = linalg.random_density_matrix(3, 3, seed=1)
    assert np.allclose(lued.apply(rho), rho, atol=1e-14)


def test_lueders_singletons_equals_dephasing():
    part = MeasurementPartition.singletons(3)
    assert superop_distance(lueders_map(part), dephasing_map(part)) <= 1e-10


def test_modified_map_action():
    part = MeasurementPartition(3, [[0, 1], [2]])
    out = modified_coarse_map(part).apply(np.diag([0.5, 0.3, 0.2]).astype(complex))
    assert np.allclose(out, np.diag([0.4, 0.4, 0.2]), atol=1e-14)


def test_modified_map_degenerate_limits():
    # singletons: the fine measurement; one block: complete mixing
    fine = MeasurementPartition.singletons(3)
    assert superop_distance(modified_coarse_map(fine), dephasing_map(fine)) <= 1e-10
    whole = MeasurementPartition.single_block(3)
    assert superop_distance(modified_coarse_map(whole), mixing_map(3)) <= 1e-10


def test_modified_image_inside_lueders_image():
    part = MeasurementPartition(4, [[0, 2], [1, 3]])
    lued, mod = lueders_map(part), modified_coarse_map(part)
    for seed in range(5):
        rho = linalg.random_density_matrix(4, 4, seed=seed)
        out = mod.apply(rho)
        assert linalg.frobenius(lued.apply(out) - out) <= 1e-10


def test_mixing_map_action():
    mix = mixing_map(2)
    rho = linalg.random_density_matrix(2, 2, seed=4)
    assert np.allclose(mix.apply(rho), np.eye(2) / 2, atol=1e-14)
    assert np.allclose(mix.apply(mix.apply(rho)), mix.apply(rho), atol=1e-14)
    assert np.allclose(mix.apply(np.eye(2, dtype=complex)), np.eye(2), atol=1e-14)


# ------------------------------------------------------------- certification

def test_certify_rejects_depolarizing():
    # rho -> 0.5 rho + 0.5 I/2, trace preserving but not idempotent
    kraus = [np.sqrt(0.625) * np.eye(2), np.sqrt(0.125) * X,
             np.sqrt(0.125) * 1j * X @ Z, np.sqrt(0.125) * Z]
    with pytest.raises(NotIdempotent):
        certify_rdm(QuantumChannel(kraus))


def test_certify_rejects_non_trace_preserving():
    with pytest.raises(ValidationError):
        certify_rdm(QuantumChannel([0.5 * np.eye(2)]))


def test_certified_maps_carry_residuals():
    rdm = dephasing_map(MeasurementPartition.singletons(2))
    assert rdm.idempotency_residual <= 1e-9
    assert rdm.unitality_residual_ <= 1e-10


def test_analytic_functions_stay_in_fixed_set():
    # f(sigma) in Fix(E) for sigma in Fix(E), f a spectral power
    for name, rdm in (("deph", dephasing_map(MeasurementPartition.singletons(3))),
                      ("lued", lueders_map(MeasurementPartition(3, [[0, 1], [2]]))),
                      ("mod", modified_coarse_map(MeasurementPartition(3, [[0, 1], [2]]))),
                      ("twirl", cyclic_twirl(3)),
                      ("mix", mixing_map(3))):
        for seed in range(3):
            sigma = rdm.apply(linalg.random_density_matrix(3, 3, seed=seed))
            for p in (0.5, 2.0):
                f = linalg.matrix_power(sigma, p)
                assert linalg.frobenius(rdm.apply(f) - f) <= 1e-8, name


# ----------------------------------------------------------------- adjoints

def test_adjoint_of_unitary_conjugation():
    rng = np.random.default_rng(2)
    G = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    U = np.linalg.qr(G)[0]
    chan = QuantumChannel([U])
    rho = linalg.random_density_matrix(3, 3, seed=2)
    back = chan.adjoint().apply(chan.apply(rho))
    assert np.allclose(back, rho, atol=1e-12)


def test_self_adjoint_builtins():
    for rdm in (dephasing_map(MeasurementPartition.singletons(2)), mixing_map(2)):
        assert float(np.linalg.norm(rdm.adjoint().superop - rdm.superop)) <= 1e-12


def test_adjoint_pairing_identity():
    maps = [dephasing_map(MeasurementPartition.singletons(3)),
            lueders_map(MeasurementPartition(3, [[0, 2], [1]])),
            modified_coarse_map(MeasurementPartition(3, [[0, 2], [1]])),
            cyclic_twirl(3), mixing_map(3)]
    for rdm in maps:
        adj = rdm.adjoint()
        for seed in range(10):
            Xh = linalg.random_hermitian(3, seed=2 * seed)
            Yh = linalg.random_hermitian(3, seed=2 * seed + 1)
            lhs = np.trace(adj.apply(Xh) @ Yh)
            rhs = np.trace(Xh @ rdm.apply(Yh))
            bound = 1e-9 * linalg.frobenius(Xh) * linalg.frobenius(Yh)
            assert abs(lhs - rhs) <= bound


def test_fixed_point_duality():
    # Fix(E^dag) contains the image of E for these self-adjoint families
    for rdm in (dephasing_map(MeasurementPartition.singletons(3)),
                cyclic_twirl(3), mixing_map(3)):
        adj = rdm.adjoint()
        for seed in range(5):
            sigma = rdm.apply(linalg.random_density_matrix(3, 3, seed=seed))
            assert linalg.frobenius(adj.apply(sigma) - sigma) <= 1e-8


# -------------------------------------------------------------- composition

def test_compose_with_identity():
    ident = QuantumChannel([np.eye(3)])
    lued = lueders_map(MeasurementPartition(3, [[0, 1], [2]]))
    combo = lued.compose(ident)
    assert float(np.linalg.norm(combo.superop - lued.superop)) <= 1e-12


def test_compose_fine_with_modified():
    part = MeasurementPartition(4, [[0, 1], [2, 3]])
    fine = dephasing_map(MeasurementPartition.singletons(4))
    mod = modified_coarse_map(part)
    assert float(np.linalg.norm(fine.compose(mod).superop - mod.superop)) <= 1e-10
    assert float(np.linalg.norm(mod.compose(fine).superop - mod.superop)) <= 1e-10


def test_compose_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        mixing_map(2).compose(mixing_map(3))


# --------------------------------------------------------------------- JSON

def test_map_json_round_trip_partition_types():
    for obj in ({"type": "dephasing", "dim": 2, "partition": [[0], [1]]},
                {"type": "lueders", "dim": 3, "partition": [[0, 1], [2]]},
                {"type": "modified", "dim": 3, "partition": [[2], [0, 1]]},
                {"type": "mixing", "dim": 4}):
        rdm = map_from_json(obj)
        again = map_from_json(map_to_json(rdm))
        assert float(np.linalg.norm(again.superop - rdm.superop)) <= 1e-12


def test_map_json_twirl_and_kraus():
    tw = map_from_json({"type": "twirl", "dim": 2,
                        "unitaries": [linalg.matrix_to_json(np.eye(2)),
                                      linalg.matrix_to_json(Z)]})
    assert superop_distance(tw, dephasing_map(MeasurementPartition.singletons(2))) <= 1e-10
    proj = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]
    kr = map_from_json({"type": "kraus", "dim": 2,
                        "operators": [linalg.matrix_to_json(K) for K in proj]})
    assert superop_distance(kr, tw) <= 1e-10
    assert map_to_json(kr)["type"] == "kraus"


def test_map_json_malformed():
    with pytest.raises(ValidationError):
        map_from_json({"type": "dephasing", "dim": 2})
    with pytest.raises(ValidationError):
        map_from_json({"type": "nosuch", "dim": 2})
    with pytest.raises(ValidationError):
        map_from_json({"dim": 2})
