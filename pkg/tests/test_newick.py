from __future__ import annotations

import random

import pytest

from splitclosure import (
    NewickParseError,
    extract_splits,
    parse_newick,
    prune,
)

from conftest import (
    mk_universe,
    oracle_tree_splits,
    rnd_tree_newick,
)

QUARTET = "((a,b),(c,d));"
CATERPILLAR = "((a,b),c,(d,e));"


def split_strs(system):
    return [str(s) for s in system.ordered()]


class TestParsing:
    def test_single_tree(self):
        (tree,) = parse_newick(QUARTET)
        assert tree.n_leaves == 4
        assert tree.leaf_taxa().labels() == ("a", "b", "c", "d")

    def test_universe_inferred_in_appearance_order(self):
        (tree,) = parse_newick("((b,a),(c,d));")
        assert tree.universe.labels == ("b", "a", "c", "d")

    def test_shared_universe_across_trees(self):
        trees = parse_newick("(a,b,(c,d));\n(c,d,(e,a));")
        assert len(trees) == 2
        assert trees[0].universe is trees[1].universe
        assert trees[0].universe.labels == ("a", "b", "c", "d", "e")
        assert trees[1].leaf_taxa().labels() == ("a", "c", "d", "e")

    def test_explicit_universe(self):
        u = mk_universe("abcde")
        (tree,) = parse_newick(QUARTET, universe=u)
        assert tree.universe is u
        assert tree.leaf_taxa().labels() == ("a", "b", "c", "d")

    def test_unknown_label_with_explicit_universe(self):
        with pytest.raises(NewickParseError) as info:
            parse_newick("((a,b),(c,x));", universe=mk_universe("abcd"))
        assert info.value.kind == "unknown-label"

    def test_branch_lengths_and_interior_labels_ignored(self):
        (plain,) = parse_newick(QUARTET)
        (decorated,) = parse_newick("((a:0.1,b:0.2)left:0.05,(c,d)right:1e-3);")
        assert extract_splits(decorated).pairs() == extract_splits(plain).pairs()

    def test_comments_skipped(self):
        (tree,) = parse_newick("((a[up],b),[note: clade](c,d));")
        assert tree.n_leaves == 4

    def test_quoted_labels(self):
        (tree,) = parse_newick("('it''s',b,c);")
        assert sorted(tree.leaf_taxa().labels()) == ["b", "c", "it's"]

    def test_whitespace_tolerant(self):
        text = "(\n  a ,\tb ,\n  ( c , d )\n) ;"
        (tree,) = parse_newick(text)
        assert tree.n_leaves == 4

    def test_rooted_and_unrooted_forms_agree(self):
        (rooted,) = parse_newick(QUARTET)
        (unrooted,) = parse_newick("(a,b,(c,d));")
        assert extract_splits(rooted).pairs() == extract_splits(unrooted).pairs()

    def test_interior_vertices_have_degree_three_or_more(self):
        (tree,) = parse_newick("(((a,b)),((c,d)));")
        for node, nbrs in tree.adj.items():
            if node not in tree.leaf_taxon:
                assert len(nbrs) >= 3

    def test_two_leaf_tree(self):
        (tree,) = parse_newick("(a,b);")
        assert tree.n_leaves == 2
        assert split_strs(extract_splits(tree)) == ["a|b"]


class TestParseErrors:
    @pytest.mark.parametrize(
        "text, kind",
        [
            ("((a,b);", "unbalanced"),
            ("(a,b));", "unbalanced"),
            ("(a,a,b);", "duplicate-leaf"),
            ("();", "empty-tree"),
            ("", "empty-tree"),
            ("(a,,b);", "empty-tree"),
            ("(a,b)", "syntax"),
            ("(a,b)(c);", "syntax"),
            ("(a,b[oops);", "comment"),
            ("('ab,c);", "label"),
            ("(a,b:;", "syntax"),
        ],
    )
    def test_kinds(self, text, kind):
        with pytest.raises(NewickParseError) as info:
            parse_newick(text)
        assert info.value.kind == kind

    def test_position_reported(self):
        with pytest.raises(NewickParseError) as info:
            parse_newick("(a,b,\n(c,(d,e),f);")
        err = info.value
        assert err.kind == "unbalanced"
        assert err.line == 1 and err.column == 1
        assert "line 1, column 1" in str(err)

    def test_duplicate_position_points_at_second_use(self):
        with pytest.raises(NewickParseError) as info:
            parse_newick("(alpha,beta,\nalpha);")
        assert info.value.line == 2 and info.value.column == 1


class TestRendering:
    def test_canonical_form_is_stable(self):
        (tree,) = parse_newick(QUARTET)
        text = tree.to_newick()
        (again,) = parse_newick(text, universe=tree.universe)
        assert again.to_newick() == text
        assert extract_splits(again).pairs() == extract_splits(tree).pairs()

    def test_roundtrip_random_trees(self):
        rng = random.Random(97)
        for _ in range(60):
            labels = [
                "t%d" % i for i in range(rng.randint(2, 9))
            ]
            text = rnd_tree_newick(rng, labels)
            (tree,) = parse_newick(text)
            (back,) = parse_newick(tree.to_newick(), universe=tree.universe)
            assert extract_splits(back).pairs() == extract_splits(tree).pairs()
            assert back.to_newick() == tree.to_newick()

    def test_quoting_preserved(self):
        (tree,) = parse_newick("('it''s',c,'d''s');")
        (back,) = parse_newick(tree.to_newick(), universe=tree.universe)
        assert sorted(back.leaf_taxa().labels()) == ["c", "d's", "it's"]


class TestExtractSplits:
    def test_quartet_with_trivial(self):
        (tree,) = parse_newick(QUARTET)
        assert split_strs(extract_splits(tree)) == [
            "a|b,c,d",
            "a,b|c,d",
            "a,b,c|d",
            "a,b,d|c",
            "a,c,d|b",
        ]

    def test_caterpillar_nontrivial_only(self):
        (tree,) = parse_newick(CATERPILLAR)
        assert split_strs(extract_splits(tree, include_trivial=False)) == [
            "a,b|c,d,e",
            "a,b,c|d,e",
        ]

    def test_partial_tree_on_shared_universe(self):
        trees = parse_newick("(a,b,(c,d));\n(c,d,(e,a));")
        system = extract_splits(trees[1], include_trivial=False)
        assert split_strs(system) == ["a,c,d|e"] or split_strs(system) == [
            "a,e|c,d"
        ]

    def test_star_tree_has_only_trivial_splits(self):
        (tree,) = parse_newick("(a,b,c,d);")
        assert len(extract_splits(tree)) == 4
        assert len(extract_splits(tree, include_trivial=False)) == 0

    def test_matches_edge_deletion_oracle(self):
        rng = random.Random(101)
        for _ in range(80):
            labels = ["t%d" % i for i in range(rng.randint(2, 10))]
            (tree,) = parse_newick(rnd_tree_newick(rng, labels))
            for include in (True, False):
                got = {s.pair for s in extract_splits(tree, include)}
                assert got == oracle_tree_splits(tree, include)


class TestPrune:
    def test_caterpillar_example(self):
        (tree,) = parse_newick(CATERPILLAR)
        out = prune(tree, ["c", "e"])
        assert out.to_newick() == "(a,b,d);"
        assert out.universe is tree.universe

    def test_taxon_set_argument(self):
        (tree,) = parse_newick(CATERPILLAR)
        keep_labels = prune(tree, tree.universe.set_of(["a"])).leaf_taxa()
        assert keep_labels.labels() == ("b", "c", "d", "e")

    def test_empty_drop_returns_same_tree(self):
        (tree,) = parse_newick(QUARTET)
        assert prune(tree, []) is tree

    def test_rejects_non_leaves(self):
        trees = parse_newick("(a,b,(c,d));\n(c,d,(e,a));")
        with pytest.raises(ValueError):
            prune(trees[1], ["b"])

    def test_rejects_total_prune(self):
        (tree,) = parse_newick(QUARTET)
        with pytest.raises(ValueError):
            prune(tree, ["a", "b", "c", "d"])

    def test_prune_to_two_leaves(self):
        (tree,) = parse_newick(QUARTET)
        out = prune(tree, ["c", "d"])
        assert out.n_leaves == 2
        assert split_strs(extract_splits(out)) == ["a|b"]

    def test_commutes_with_restriction(self):
        rng = random.Random(103)
        for _ in range(80):
            labels = ["t%d" % i for i in range(rng.randint(3, 9))]
            (tree,) = parse_newick(rnd_tree_newick(rng, labels))
            leaves = tree.leaf_taxa()
            drop = [l for l in leaves.labels() if rng.random() < 0.4]
            if len(drop) >= len(labels) - 1:
                continue
            keep = leaves - tree.universe.set_of(drop)
            direct = extract_splits(prune(tree, drop))
            via_restrict = extract_splits(tree).restrict(keep)
            assert direct == via_restrict
