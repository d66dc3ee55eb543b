''' Voxel domain tests '''
# -*- coding: utf-8 -*-
# pylint: disable=missing-docstring
from unittest import TestCase

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from tdgl.domain import (
    build_box_domain, build_fichera_domain, build_lshape_domain, classify_boundary, domain_from_descriptor,
    domain_from_mask, edge_cell_counts,
)
from tdgl.exceptions import InvalidArgument


class DomainBuildTest(TestCase):
    ''' Box, L-shape and Fichera voxelizations '''

    def test_box(self):
        domain = build_box_domain((4, 4, 4), (1.0, 1.0, 1.0))
        self.assertEqual(domain.n_inside, 64)
        self.assertAlmostEqual(domain.volume, 1.0)
        self.assertEqual(domain.spacing, (0.25, 0.25, 0.25))
        self.assertEqual(domain.bbox, ((0.0, 1.0), (0.0, 1.0), (0.0, 1.0)))

    def test_lshape_removes_one_quadrant(self):
        domain = build_lshape_domain((4, 4, 2), (1.0, 1.0, 1.0))
        self.assertEqual(domain.n_inside, 24)
        self.assertAlmostEqual(domain.volume, 0.75)
        self.assertFalse(domain.mask[3, 3, 0])
        self.assertTrue(domain.mask[3, 1, 1])
        self.assertTrue(domain.mask[1, 3, 1])

    def test_lshape_other_axes(self):
        domain = build_lshape_domain((2, 4, 4), (1.0, 2.0, 2.0), removed_quadrant=('y', 'z'))
        self.assertEqual(domain.n_inside, 24)
        self.assertFalse(domain.mask[0, 2, 2])

    def test_lshape_needs_even_counts(self):
        with self.assertRaises(InvalidArgument):
            build_lshape_domain((5, 4, 2), (1.0, 1.0, 1.0))
        with self.assertRaises(InvalidArgument):
            build_lshape_domain((4, 4, 2), (1.0, 1.0, 1.0), removed_quadrant=('x', 'x'))

    def test_fichera(self):
        domain = build_fichera_domain((4, 4, 4), (1.0, 1.0, 1.0))
        self.assertEqual(domain.n_inside, 56)
        self.assertAlmostEqual(domain.volume, 0.875)

    def test_invalid_box(self):
        with self.assertRaises(InvalidArgument):
            build_box_domain((1, 4, 4), (1.0, 1.0, 1.0))
        with self.assertRaises(InvalidArgument):
            build_box_domain((4, 4, 4), (1.0, -1.0, 1.0))
        with self.assertRaises(InvalidArgument):
            build_box_domain((4, 4), (1.0, 1.0))

    def test_mask_is_read_only(self):
        domain = build_box_domain((2, 2, 2), (1.0, 1.0, 1.0))
        with self.assertRaises(ValueError):
            domain.mask[0, 0, 0] = False


class MaskDomainTest(TestCase):
    ''' User supplied masks and descriptors '''

    def test_disconnected_mask(self):
        mask = np.zeros((4, 2, 2), dtype=bool)
        mask[0] = True
        mask[3] = True
        with self.assertRaises(InvalidArgument):
            domain_from_mask(mask, (1.0, 1.0, 1.0))

    def test_empty_mask(self):
        with self.assertRaises(InvalidArgument):
            domain_from_mask(np.zeros((2, 2, 2), dtype=bool), (1.0, 1.0, 1.0))

    def test_descriptor_reproduces_domain(self):
        domain = build_lshape_domain((4, 6, 2), (1.0, 1.5, 0.5))
        again = domain_from_descriptor(domain.to_json())
        self.assertEqual(again, domain)
        self.assertEqual(again.kind, 'lshape')
        self.assertEqual(again.digest(), domain.digest())
        self.assertNotEqual(build_box_domain((4, 6, 2), (1.0, 1.5, 0.5)).digest(), domain.digest())

    def test_descriptor_size_mismatch(self):
        descriptor = build_box_domain((2, 2, 2), (1.0, 1.0, 1.0)).to_descriptor()
        descriptor['cell_counts'] = [2, 2, 3]
        with self.assertRaises(InvalidArgument):
            domain_from_descriptor(descriptor)

    def test_malformed_descriptor(self):
        with self.assertRaises(InvalidArgument):
            domain_from_descriptor({'cell_counts': [2, 2, 2]})


class BoundaryTest(TestCase):
    ''' Boundary faces, normals and re-entrant edges '''

    def test_box_boundary(self):
        boundary = classify_boundary(build_box_domain((2, 2, 2), (1.0, 1.0, 1.0)))
        self.assertEqual(len(boundary.faces), 24)
        self.assertEqual(len(boundary.reentrant_edges), 0)
        assert_allclose(boundary.area_vector_sum(), np.zeros(3), atol=1e-14)

    def test_normals_point_outward(self):
        boundary = classify_boundary(build_box_domain((2, 2, 2), (1.0, 1.0, 1.0)))
        for (axis, i, j, k), normal in boundary.boundary_faces:
            position = (i, j, k)[axis]
            self.assertEqual(normal[axis], -1 if position == 0 else 1)

    def test_lshape_reentrant_edge(self):
        domain = build_lshape_domain((4, 4, 2), (1.0, 1.0, 1.0))
        boundary = classify_boundary(domain)
        assert_array_equal(boundary.reentrant_edges, [[2, 2, 2, 0], [2, 2, 2, 1]])
        assert_allclose(boundary.area_vector_sum(), np.zeros(3), atol=1e-14)
        total_area = boundary.areas.sum()
        # top and bottom, outer walls, re-entrant walls
        self.assertAlmostEqual(total_area, 1.5 + 3.0 + 1.0)

    def test_cube_face_count(self):
        boundary = classify_boundary(build_box_domain((4, 4, 4), (1.0, 1.0, 1.0)))
        self.assertEqual(len(boundary.faces), 6 * 16)
        self.assertEqual(len(boundary.reentrant_edges), 0)

    def test_lshape_edge_per_layer(self):
        boundary = classify_boundary(build_lshape_domain((4, 4, 4), (1.0, 1.0, 1.0)))
        self.assertEqual(len(boundary.reentrant_edges), 4)
        assert_array_equal(boundary.reentrant_edges[:, 3], [0, 1, 2, 3])

    def test_classification_is_repeatable(self):
        domain = build_lshape_domain((4, 4, 4), (1.0, 1.0, 1.0))
        first, second = classify_boundary(domain), classify_boundary(domain)
        assert_array_equal(first.faces, second.faces)
        assert_array_equal(first.normals, second.normals)
        assert_array_equal(first.areas, second.areas)
        assert_array_equal(first.reentrant_edges, second.reentrant_edges)

    def test_fichera_reentrant_edges(self):
        boundary = classify_boundary(build_fichera_domain((2, 2, 2), (1.0, 1.0, 1.0)))
        self.assertEqual(sorted(int(axis) for axis in boundary.reentrant_edges[:, 0]), [0, 1, 2])

    def test_edge_cell_counts(self):
        counts = edge_cell_counts(np.ones((2, 2, 2), dtype=bool), 2)
        self.assertEqual(counts.shape, (3, 3, 2))
        self.assertEqual(int(counts[1, 1, 0]), 4)
        self.assertEqual(int(counts[0, 1, 0]), 2)
        self.assertEqual(int(counts[0, 0, 0]), 1)
