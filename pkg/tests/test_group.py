"""
Tests for group tables and group structure certification.
"""

import unittest
import sys
from itertools import permutations
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.group import (
    AP1_GROUP, AP1_STAR_GROUP, AP2_PROBE, DT_GROUP, NO_AP1_ADJACENCY, CarrierMismatchError, GroupPreconditionError,
    GroupTable, GroupTableError, ap2_probe, check_ap1_group, check_dt_group, cyclic_group, direct_product_group,
    group_from_dict, product_group_probe, trivial_group, verify_group, window_addition, window_group_check
)
from src.image import DigitalImage, SimpleClosedCurve, builtin_curve, list_builtin_curves, msc18, window_image
from src.product import NoAdjacencyError, ap_relation, c_star, lattice_relation, product


def symmetric_group():
    """S_3 on six points of Z, composed as permutations."""
    perms = list(permutations(range(3)))
    table = [
        [perms.index(tuple(a[b[x]] for x in range(3))) for b in perms]
        for a in perms
    ]
    return GroupTable.from_table([[i] for i in range(6)], table)


class TestGroupTable(unittest.TestCase):
    """Test table construction and axiom checks."""

    def test_cyclic(self):
        curve = msc18()
        g = cyclic_group(curve)
        self.assertTrue(verify_group(g))
        self.assertEqual(g.identity, curve.seq[0])
        self.assertEqual(g.invert(curve.seq[1]), curve.seq[5])
        self.assertEqual(g.multiply(curve.seq[4], curve.seq[3]), curve.seq[1])
        self.assertTrue(g.is_abelian())

    def test_every_fixture_curve_is_a_cyclic_group(self):
        for name in ['msc18', 'sc4_2_4', 'sc8_2_4', 'sc8_2_6', 'sc18_3_6', 'sc26_3_4', 'sc6_3_6']:
            self.assertTrue(verify_group(cyclic_group(builtin_curve(name))))

    def test_non_abelian(self):
        g = symmetric_group()
        self.assertTrue(verify_group(g))
        self.assertFalse(g.is_abelian())

    def test_closure(self):
        check = verify_group(GroupTable.from_table([[0], [1]], [[0, 5], [1, 0]]))
        self.assertFalse(check)
        self.assertEqual(check.axiom, 'closure')

    def test_associativity(self):
        subtraction = [[(a - b) % 3 for b in range(3)] for a in range(3)]
        check = verify_group(GroupTable.from_table([[0], [1], [2]], subtraction))
        self.assertEqual(check.axiom, 'associativity')

    def test_identity(self):
        check = verify_group(GroupTable.from_table([[0], [1]], [[0, 0], [0, 0]]))
        self.assertEqual(check.axiom, 'identity')

    def test_inverse(self):
        check = verify_group(GroupTable.from_table([[0], [1]], [[0, 0], [0, 1]]))
        self.assertEqual(check.axiom, 'inverse')
        self.assertIn("element 0", check.detail)

    def test_table_shape(self):
        with self.assertRaises(GroupTableError):
            GroupTable.from_table([[0], [1]], [[0, 1]])
        with self.assertRaises(GroupTableError):
            GroupTable.from_table([[0], [0]], [[0, 1], [1, 0]])
        with self.assertRaises(GroupTableError):
            GroupTable.from_table([[0], [1]], [[0, True], [1, 0]])
        with self.assertRaises(GroupTableError):
            GroupTable.from_table([], [])

    def test_direct_product(self):
        g1 = cyclic_group(builtin_curve('sc4_2_4'))
        g2 = cyclic_group(builtin_curve('sc8_2_4'))
        g = direct_product_group(g1, g2)
        self.assertEqual(g.order, 16)
        self.assertTrue(verify_group(g))
        self.assertEqual(g.identity, g1.identity + g2.identity)
        p = g1.carrier[1] + g2.carrier[3]
        q = g1.carrier[2] + g2.carrier[2]
        self.assertEqual(g.multiply(p, q), g1.carrier[3] + g2.carrier[1])

    def test_trivial(self):
        g = trivial_group((0, 0))
        self.assertTrue(verify_group(g))
        self.assertEqual(g.identity, (0, 0))

    def test_group_from_dict(self):
        curve = builtin_curve('sc8_2_4')
        self.assertEqual(group_from_dict({'cyclic': True}, curve), cyclic_group(curve))
        with self.assertRaises(GroupTableError):
            group_from_dict({'cyclic': True}, DigitalImage.from_points([(0, 0)], t=1))
        with self.assertRaises(GroupTableError):
            group_from_dict({'table': [[0]]}, curve)
        g = group_from_dict({'carrier': [[0, 0]], 'table': [[0]]}, curve)
        self.assertEqual(g.order, 1)


class TestDTGroup(unittest.TestCase):
    """Test DT-k-group certification."""

    def test_msc18(self):
        verdict = check_dt_group(msc18(), cyclic_group(msc18()))
        self.assertTrue(verdict.holds)
        self.assertEqual(verdict.structure, DT_GROUP)
        self.assertEqual(verdict.adjacency_used, "G_k* with k*=72")
        self.assertTrue(verdict.abelian)
        self.assertTrue(verdict.inverse.continuous)

    def test_other_curves(self):
        for name in ['sc18_3_6', 'sc8_2_4', 'sc4_2_4']:
            curve = builtin_curve(name)
            self.assertTrue(check_dt_group(curve, cyclic_group(curve)).holds)

    def test_c_star_variant(self):
        diamond = builtin_curve('sc8_2_4')
        verdict = check_dt_group(diamond, cyclic_group(diamond), use_c_star=True)
        self.assertTrue(verdict.holds)
        self.assertEqual(verdict.adjacency_used, "C_k* with k*=32")

    def test_c_star_variant_without_c_star(self):
        verdict = check_dt_group(msc18(), cyclic_group(msc18()), use_c_star=True)
        self.assertFalse(verdict.holds)
        self.assertEqual(verdict.reason, "no C-compatible adjacency exists")

    def test_carrier_mismatch(self):
        with self.assertRaises(CarrierMismatchError):
            check_dt_group(msc18(), cyclic_group(builtin_curve('sc8_2_4')))

    def test_invalid_table(self):
        curve = builtin_curve('sc4_2_4')
        zeros = GroupTable(curve.seq, tuple((0,) * 4 for _ in range(4)))
        with self.assertRaises(GroupTableError):
            check_dt_group(curve, zeros)

    def test_to_dict(self):
        data = check_dt_group(msc18(), cyclic_group(msc18())).to_dict()
        self.assertTrue(data['holds'])
        self.assertIsNone(data['multiplication']['witness'])
        self.assertEqual(data['per_t'], {})


class TestAP1Group(unittest.TestCase):
    """Test AP_1 and AP_1* group certification."""

    def test_msc18_has_no_adjacency(self):
        for star in (False, True):
            verdict = check_ap1_group(msc18(), cyclic_group(msc18()), star=star)
            self.assertFalse(verdict.holds)
            self.assertEqual(verdict.reason, NO_AP1_ADJACENCY)
            self.assertIsNone(verdict.multiplication)

    def test_diamond_star(self):
        diamond = builtin_curve('sc8_2_4')
        verdict = check_ap1_group(diamond, cyclic_group(diamond), star=True)
        self.assertTrue(verdict.holds)
        self.assertEqual(verdict.structure, AP1_STAR_GROUP)
        self.assertEqual(verdict.adjacency_used, "AP_1* = k(2,4)=32")
        self.assertEqual(verdict.per_t, {2: True})

    def test_diamond_every_admissible_t(self):
        diamond = builtin_curve('sc8_2_4')
        verdict = check_ap1_group(diamond, cyclic_group(diamond))
        self.assertTrue(verdict.holds)
        self.assertEqual(verdict.structure, AP1_GROUP)
        self.assertEqual(sorted(verdict.per_t), [2, 3])

    def test_square_star(self):
        square = builtin_curve('sc4_2_4')
        verdict = check_ap1_group(square, cyclic_group(square), star=True)
        self.assertTrue(verdict.holds)
        self.assertEqual(verdict.adjacency_used, "AP_1* = k(1,4)=8")

    def test_star_group_matches_dt_group_on_c_star(self):
        checked = 0
        for name in list_builtin_curves():
            curve = builtin_curve(name)
            if not isinstance(curve, SimpleClosedCurve):
                continue
            decision = c_star(curve, curve)
            if not decision.exists:
                continue
            square = product([curve, curve])
            ap1_star, _ = ap_relation(square, 1)
            self.assertEqual(ap1_star.pairs, lattice_relation(square, decision.adjacency.t).pairs, name)
            g = cyclic_group(curve)
            self.assertEqual(
                check_ap1_group(curve, g, star=True).holds,
                check_dt_group(curve, g, use_c_star=True).holds,
                name
            )
            checked += 1
        self.assertGreaterEqual(checked, 2)


class TestWindowGroups(unittest.TestCase):
    """Test (Z^n, k, +) on finite windows."""

    def test_city_block_plane(self):
        verdict = window_group_check(2, 1, 3, 1)
        self.assertTrue(verdict.holds)
        self.assertTrue(verdict.abelian)

    def test_chessboard_plane(self):
        self.assertTrue(window_group_check(2, 2, 3, 1).holds)

    def test_ap2_plane_fails(self):
        verdict = window_group_check(2, 1, 2, 2)
        self.assertFalse(verdict.holds)
        self.assertEqual(verdict.structure, AP2_PROBE)
        self.assertEqual(verdict.multiplication.witness, ((0, 0, 0, 0), (1, 0, 1, 0), (0, 0), (2, 0)))

    def test_ap2_line_fails(self):
        verdict = window_group_check(1, 1, 2, 2)
        self.assertEqual(verdict.multiplication.witness, ((0, 0), (1, 1), (0,), (2,)))

    def test_ap2_probe_on_window(self):
        verdict = ap2_probe(window_image(2, 1, 2))
        self.assertEqual(verdict.multiplication.witness, ((0, 0, 0, 0), (1, 0, 1, 0), (0, 0), (2, 0)))

    def test_window_addition_leaves_window(self):
        square, addition = window_addition(window_image(1, 1, 1))
        self.assertEqual(len(square), 9)
        self.assertEqual(addition((1, 1)), (2,))

    def test_parameters(self):
        with self.assertRaises(ValueError):
            window_group_check(2, 1, 0, 1)
        with self.assertRaises(ValueError):
            window_group_check(2, 1, 2, 3)
        with self.assertRaises(ValueError):
            window_group_check(2, 3, 2, 1)


class TestProbes(unittest.TestCase):
    """Test the AP_2 probe on curves and the direct product probe."""

    def test_ap2_probe_diamond(self):
        diamond = builtin_curve('sc8_2_4')
        verdict = ap2_probe(diamond, cyclic_group(diamond))
        self.assertFalse(verdict.holds)
        self.assertEqual(verdict.adjacency_used, "AP_2* = k(4,4)=80")
        self.assertEqual(verdict.multiplication.witness, ((0, 0, 0, 0), (1, 1, 1, 1), (0, 0), (2, 0)))

    def test_ap2_probe_without_adjacency(self):
        with self.assertRaises(NoAdjacencyError):
            ap2_probe(msc18(), cyclic_group(msc18()))

    def test_product_of_square_and_diamond(self):
        square, diamond = builtin_curve('sc4_2_4'), builtin_curve('sc8_2_4')
        verdict = product_group_probe(square, cyclic_group(square), diamond, cyclic_group(diamond))
        self.assertFalse(verdict.holds)
        self.assertEqual(verdict.reason, "no AP_1(4,8,4,8) adjacency")

    def test_product_of_squares(self):
        square = builtin_curve('sc4_2_4')
        verdict = product_group_probe(square, cyclic_group(square), square, cyclic_group(square))
        self.assertTrue(verdict.holds)
        self.assertIsNone(verdict.reason)
        self.assertTrue(verdict.abelian)

    def test_product_of_trivial_groups(self):
        point = DigitalImage.from_points([(0, 0)], t=1)
        g = trivial_group((0, 0))
        self.assertTrue(product_group_probe(point, g, point, g).holds)

    def test_product_precondition(self):
        square = builtin_curve('sc4_2_4')
        with self.assertRaises(GroupPreconditionError):
            product_group_probe(msc18(), cyclic_group(msc18()), square, cyclic_group(square))


if __name__ == '__main__':
    unittest.main()
