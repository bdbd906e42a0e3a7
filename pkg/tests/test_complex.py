import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import complexes, graphs
from chainlab.complex import (
    ComplexBuilder,
    SimplicialComplex,
    adj,
    exterior_counts,
    exterior_faces,
    f_vector,
    flag_completion,
    format_complex,
    full_skeleton,
    graph,
    induced_subcomplex,
    parse_complex,
    read_complex,
    write_complex,
)
from chainlab.errors import StructureError, VertexNotFoundError
from chainlab.pattern import build_pattern


def triangle():
    return SimplicialComplex(3, 2, [(0, 1, 2)], close=True)


class TestConstruction:
    def test_close_adds_subfaces(self):
        K = triangle()
        assert f_vector(K) == [3, 3, 1]
        assert (0, 2) in K and (1,) in K and (0, 1, 2) in K

    def test_not_closed_is_rejected(self):
        with pytest.raises(StructureError) as info:
            SimplicialComplex(3, 1, [(0,), (0, 1)])
        assert info.value.face == (1,)

    def test_face_above_cap(self):
        with pytest.raises(ValueError):
            SimplicialComplex(3, 1, [(0, 1, 2)], close=True)

    def test_vertex_out_of_range(self):
        with pytest.raises(ValueError):
            SimplicialComplex(3, 1, [(0, 3)], close=True)

    def test_duplicate_vertices(self):
        with pytest.raises(ValueError):
            SimplicialComplex(3, 1, [(1, 1)], close=True)

    def test_builder_is_chainable(self):
        K = ComplexBuilder(4, 1).add((0, 1), close=True).add((2,)).build()
        assert K.vertices == (0, 1, 2)

    def test_empty_complex(self):
        K = SimplicialComplex(5, 2)
        assert f_vector(K) == [0, 0, 0]
        assert K.dim == -1 and len(K) == 0

    def test_iteration_is_dimension_then_lex(self):
        K = SimplicialComplex(6, 2, [(3, 4, 5), (0, 5), (0, 1, 4)], close=True)
        faces = list(K)
        assert faces == sorted(faces, key=lambda s: (len(s), s))

    def test_equality_and_hash(self):
        a = SimplicialComplex(4, 1, [(0, 1), (2, 3)], close=True)
        b = SimplicialComplex(4, 1, [(3, 2), (1, 0)], close=True)
        assert a == b and hash(a) == hash(b)


@given(complexes())
def test_downward_closed(K):
    for s in K:
        for k in range(1, len(s)):
            for b in itertools.combinations(s, k):
                assert b in K


@given(complexes())
def test_sorted_masks_match_tuple_order(K):
    for d in range(K.r + 1):
        assert [f for f in K if len(f) == d + 1] == sorted(K.faces(d))


class TestFVector:
    def test_full_skeleton(self):
        assert f_vector(full_skeleton(4, 2)) == [4, 6, 4]

    def test_pattern_graph(self):
        A = build_pattern(3).A
        assert f_vector(A)[:2] == [10, 28]

    def test_length_is_cap_plus_one(self):
        assert f_vector(SimplicialComplex(5, 3, [(0, 1)], close=True)) == [2, 1, 0, 0]


class TestExteriorFaces:
    def test_vertices_convention(self):
        K = SimplicialComplex(4, 1, [(0,), (2,)])
        assert exterior_faces(K, 0) == {(1,), (3,)}

    def test_pattern_polygon_sides(self):
        P = build_pattern(3)
        assert exterior_faces(P.B, 1) == set(P.polygon_sides)
        assert len(P.polygon_sides) == 8
        for d in range(2, P.B.r + 1):
            assert exterior_faces(P.B, d) == set()

    def test_full_skeleton_has_none(self):
        K = full_skeleton(6, 3)
        assert all(not exterior_faces(K, d) for d in range(4))

    def test_hollow_triangle(self):
        K = SimplicialComplex(3, 2, [(0, 1), (1, 2), (0, 2)], close=True)
        assert exterior_faces(K, 2) == {(0, 1, 2)}
        assert exterior_counts(K, 3) == [0, 0, 1, 0]

    def test_dimension_range(self):
        K = triangle()
        with pytest.raises(ValueError):
            exterior_faces(K, 3)
        with pytest.raises(ValueError):
            exterior_faces(K, -1)

    @given(graphs(min_n=4, max_n=9), st.integers(3, 4), st.data())
    def test_against_oracle_with_holes(self, G, r, data):
        # a clique complex with some top faces removed has exterior faces in dimension r
        K = flag_completion(G, r)
        tops = sorted(K.faces(r))
        drop = set(data.draw(st.lists(st.sampled_from(tops), unique=True))) if tops else set()
        H = SimplicialComplex(K.N, r, [f for f in K if f not in drop])
        for d in range(r + 1):
            assert exterior_faces(H, d) == oracles.exterior(set(H), H.N, d)
        assert drop <= exterior_faces(H, r)

    @given(complexes())
    def test_against_oracle(self, K):
        faces = set(K)
        for d in range(K.r + 1):
            ext = exterior_faces(K, d)
            assert ext == oracles.exterior(faces, K.N, d)
            assert not ext & K.faces(d)


class TestInduced:
    def test_all_vertices(self):
        K = triangle()
        assert induced_subcomplex(K, range(3)) == K

    def test_empty_set(self):
        assert len(induced_subcomplex(triangle(), [])) == 0

    def test_restriction(self):
        assert set(induced_subcomplex(triangle(), [0, 1])) == {(0,), (1,), (0, 1)}

    @given(complexes(), st.sets(st.integers(0, 7)))
    def test_idempotent(self, K, S):
        once = induced_subcomplex(K, S)
        assert induced_subcomplex(once, S) == once
        assert set(once) == {f for f in K if set(f) <= S}


class TestAdj:
    def test_isolated(self):
        assert adj(SimplicialComplex(2, 0, [(0,)]), 0) == frozenset()

    def test_star_centre(self):
        G = graph(4, [(0, 1), (0, 2), (0, 3)])
        assert adj(G, 0) == {1, 2, 3}

    def test_pattern_vertex(self):
        A = build_pattern(3).A
        assert adj(A, 0) == {2, 3, 4, 5, 6, 8}
        assert len(adj(A, 0)) == 6

    def test_missing_vertex(self):
        K = SimplicialComplex(3, 0, [(0,)])
        with pytest.raises(VertexNotFoundError):
            adj(K, 1)
        with pytest.raises(VertexNotFoundError):
            adj(K, 7)


class TestFlagCompletion:
    def test_triangle(self):
        K = flag_completion(graph(3, [(0, 1), (1, 2), (0, 2)]), 2)
        assert (0, 1, 2) in K

    def test_four_cycle(self):
        K = flag_completion(graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)]), 3)
        assert K.dim == 1

    def test_rejects_higher_faces(self):
        with pytest.raises(ValueError):
            flag_completion(triangle(), 2)

    def test_pattern_clique(self):
        # w0, w1, v0, v2, v4 for g = 3
        B = build_pattern(3).B
        S = [0, 2, 4, 8, 9]
        edges = set(B.faces(1))
        for t in itertools.combinations(S, 3):
            clique = all(e in edges for e in itertools.combinations(t, 2))
            assert (t in B) == clique

    @given(graphs(max_n=9), st.integers(1, 4))
    def test_against_clique_oracle(self, G, r):
        K = flag_completion(G, r)
        E = set(G.faces(1))
        for d in range(2, r + 1):
            expect = {s for s in itertools.combinations(range(G.N), d + 1)
                      if all(e in E for e in itertools.combinations(s, 2))}
            assert K.faces(d) == expect
        assert f_vector(K)[1] == len(E)


class TestTextFormat:
    def test_roundtrip_file(self, tmp_path):
        K = build_pattern(2).B
        path = tmp_path / "b.txt"
        write_complex(K, path)
        assert read_complex(path) == K
        assert path.read_text().splitlines()[0] == f"{K.N} {K.r}"

    def test_comments_and_blank_lines(self):
        K = parse_complex("# header next\n3 1\n\n0\n1 # vertex\n0 1\n")
        assert set(K) == {(0,), (1,), (0, 1)}

    def test_bad_header(self):
        with pytest.raises(ValueError):
            parse_complex("3\n0\n")
        with pytest.raises(ValueError):
            parse_complex("")

    def test_unclosed_file(self):
        with pytest.raises(StructureError):
            parse_complex("3 1\n0 1\n")
        assert len(parse_complex("3 1\n0 1\n", close=True)) == 3

    @given(complexes())
    def test_roundtrip(self, K):
        assert parse_complex(format_complex(K)) == K
