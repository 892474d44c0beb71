"""Newick reading, leaf pruning, and split extraction for partial trees.

Trees are treated as unrooted: the rooted nesting structure of the
input is flattened to an adjacency, degree-2 vertices (the root
included) are suppressed, and interior labels and branch lengths are
discarded.  Leaf label sets may differ from tree to tree; that is what
makes the extracted splits partial.
"""

from __future__ import annotations

from .core import (
    RESERVED_LABEL_CHARS,
    SplitSystem,
    TaxonSet,
    TaxonUniverse,
    canon_pair,
)


class NewickParseError(ValueError):
    """A malformed Newick input, with position and error kind.

    kind is one of: syntax, unbalanced, duplicate-leaf, unknown-label,
    empty-tree, comment, label.
    """

    def __init__(self, kind, message, line=None, column=None):
        self.kind = kind
        self.line = line
        self.column = column
        if line is not None:
            message = "line %d, column %d: %s" % (line, column, message)
        super().__init__(message)


_BARE_STOP = frozenset("();,:[]' \t\r\n")


def _tokenize(text):
    """Yield (kind, value, line, column) tokens, ending with ('end', ...).

    kind is one of the punctuation characters ( ) , : ; or 'label' for
    bare and quoted names.  Square-bracket comments are skipped,
    quoted labels may escape a quote by doubling it.
    """
    i = 0
    line = 1
    col = 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch == "[":
            start_line, start_col = line, col
            i += 1
            col += 1
            while i < n and text[i] != "]":
                if text[i] == "\n":
                    line += 1
                    col = 1
                else:
                    col += 1
                i += 1
            if i >= n:
                raise NewickParseError(
                    "comment", "unterminated [comment]", start_line, start_col
                )
            i += 1
            col += 1
            continue
        if ch == "'":
            start_line, start_col = line, col
            i += 1
            col += 1
            buf = []
            while True:
                if i >= n:
                    raise NewickParseError(
                        "label",
                        "unterminated quoted label",
                        start_line,
                        start_col,
                    )
                c = text[i]
                if c == "'":
                    if i + 1 < n and text[i + 1] == "'":
                        buf.append("'")
                        i += 2
                        col += 2
                        continue
                    i += 1
                    col += 1
                    break
                if c == "\n":
                    line += 1
                    col = 1
                else:
                    col += 1
                buf.append(c)
                i += 1
            yield ("label", "".join(buf), start_line, start_col)
            continue
        if ch in "();,:":
            yield (ch, ch, line, col)
            i += 1
            col += 1
            continue
        start_col = col
        j = i
        while j < n and text[j] not in _BARE_STOP:
            j += 1
        yield ("label", text[i:j], line, start_col)
        col += j - i
        i = j
    yield ("end", "", line, col)


class _TreeBuilder:
    """Adjacency under construction for a single tree."""

    def __init__(self):
        self.adj = {}
        self.leaf_label = {}
        self.leaf_pos = {}
        self._labels = set()
        self._next = 0

    def _node(self):
        node = self._next
        self._next += 1
        self.adj[node] = set()
        return node

    def interior(self):
        return self._node()

    def leaf(self, label, line, col):
        if not label:
            raise NewickParseError("label", "empty leaf label", line, col)
        bad = set(label) & RESERVED_LABEL_CHARS
        if bad:
            raise NewickParseError(
                "label",
                "leaf label %r contains reserved character %r"
                % (label, sorted(bad)[0]),
                line,
                col,
            )
        if label in self._labels:
            raise NewickParseError(
                "duplicate-leaf",
                "leaf label %r appears more than once in one tree" % label,
                line,
                col,
            )
        self._labels.add(label)
        node = self._node()
        self.leaf_label[node] = label
        self.leaf_pos[node] = (line, col)
        return node

    def connect(self, a, b):
        self.adj[a].add(b)
        self.adj[b].add(a)


class _Parser:
    def __init__(self, text):
        self.tokens = list(_tokenize(text))
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        if tok[0] != "end":
            self.pos += 1
        return tok

    def parse_trees(self):
        builders = []
        while self.peek()[0] != "end":
            builders.append(self.parse_tree())
        if not builders:
            kind, _, line, col = self.peek()
            raise NewickParseError("empty-tree", "no trees in input", line, col)
        return builders

    def parse_tree(self):
        builder = _TreeBuilder()
        self.parse_subtree(builder)
        kind, value, line, col = self.take()
        if kind == ";":
            return builder
        if kind == "end":
            raise NewickParseError(
                "syntax", "missing ';' at end of tree", line, col
            )
        if kind == ")":
            raise NewickParseError("unbalanced", "unmatched ')'", line, col)
        raise NewickParseError(
            "syntax", "expected ';' after tree, found %r" % value, line, col
        )

    def parse_subtree(self, builder):
        kind, value, line, col = self.peek()
        if kind == "(":
            self.take()
            node = builder.interior()
            if self.peek()[0] == ")":
                raise NewickParseError(
                    "empty-tree", "empty subtree '()'", line, col
                )
            while True:
                child = self.parse_subtree(builder)
                builder.connect(node, child)
                k, v, l, c = self.take()
                if k == ",":
                    continue
                if k == ")":
                    break
                if k == "end" or k == ";":
                    raise NewickParseError(
                        "unbalanced",
                        "'(' opened here is never closed",
                        line,
                        col,
                    )
                raise NewickParseError(
                    "syntax", "expected ',' or ')', found %r" % v, l, c
                )
            if self.peek()[0] == "label":
                self.take()
            self._skip_length()
            return node
        if kind == "label":
            self.take()
            node = builder.leaf(value, line, col)
            self._skip_length()
            return node
        if kind == ")":
            raise NewickParseError("unbalanced", "unmatched ')'", line, col)
        if kind in (",", ";"):
            raise NewickParseError(
                "empty-tree", "missing subtree before %r" % value, line, col
            )
        raise NewickParseError("syntax", "unexpected end of input", line, col)

    def _skip_length(self):
        if self.peek()[0] != ":":
            return
        self.take()
        kind, _, line, col = self.peek()
        if kind != "label":
            raise NewickParseError(
                "syntax", "expected a branch length after ':'", line, col
            )
        self.take()


def _cleanup(adj, leaf_taxon):
    """Normalize an adjacency in place to the unrooted invariant.

    Interior vertices of degree one or zero are removed and degree-2
    interior vertices are suppressed, so afterwards every interior
    vertex has degree at least three.
    """
    changed = True
    while changed:
        changed = False
        for node in list(adj):
            if node in leaf_taxon:
                continue
            nbrs = adj[node]
            if len(nbrs) == 0:
                if len(adj) > 1:
                    del adj[node]
                    changed = True
            elif len(nbrs) == 1:
                (u,) = nbrs
                adj[u].discard(node)
                del adj[node]
                changed = True
            elif len(nbrs) == 2:
                u, v = nbrs
                adj[u].discard(node)
                adj[v].discard(node)
                adj[u].add(v)
                adj[v].add(u)
                del adj[node]
                changed = True


def _needs_quotes(label):
    return bool(set(label) & _BARE_STOP)


def _render_label(label):
    if _needs_quotes(label):
        return "'%s'" % label.replace("'", "''")
    return label


class PhyloTree:
    """An unrooted tree whose leaves carry taxa of a shared universe.

    Interior vertices are unlabelled and have degree at least three;
    multifurcations are allowed.  The leaf set may be any nonempty
    subset of the universe.
    """

    __slots__ = ("universe", "adj", "leaf_taxon")

    def __init__(self, universe, adjacency, leaf_taxon):
        taxa = list(leaf_taxon.values())
        if not taxa:
            raise ValueError("a tree needs at least one leaf")
        if len(set(taxa)) != len(taxa):
            raise ValueError("leaf taxa must be distinct")
        self.universe = universe
        self.adj = {node: tuple(sorted(nbrs)) for node, nbrs in adjacency.items()}
        self.leaf_taxon = dict(leaf_taxon)

    def leaf_nodes(self):
        return sorted(self.leaf_taxon)

    def leaf_taxa(self):
        mask = 0
        for t in self.leaf_taxon.values():
            mask |= 1 << t
        return TaxonSet(self.universe, mask)

    @property
    def n_leaves(self):
        return len(self.leaf_taxon)

    def edges(self):
        return [
            (u, v) for u in sorted(self.adj) for v in self.adj[u] if u < v
        ]

    def __repr__(self):
        return "PhyloTree(%d leaves, %d vertices)" % (
            self.n_leaves,
            len(self.adj),
        )

    def to_newick(self):
        """Deterministic Newick form, rooted next to the smallest taxon."""
        leaf_of = {taxon: node for node, taxon in self.leaf_taxon.items()}
        label = {
            node: self.universe.label_of(t)
            for node, t in self.leaf_taxon.items()
        }
        if len(self.adj) == 1:
            (node,) = self.adj
            return _render_label(label[node]) + ";"

        min_map = {}

        def min_taxon(node, parent):
            if node in self.leaf_taxon:
                m = self.leaf_taxon[node]
            else:
                m = min(
                    min_taxon(c, node) for c in self.adj[node] if c != parent
                )
            min_map[(node, parent)] = m
            return m

        def render(node, parent):
            if node in self.leaf_taxon:
                return _render_label(label[node])
            children = sorted(
                (c for c in self.adj[node] if c != parent),
                key=lambda c: min_map[(c, node)],
            )
            return "(" + ",".join(render(c, node) for c in children) + ")"

        start_leaf = leaf_of[min(leaf_of)]
        root = self.adj[start_leaf][0]
        min_taxon(root, None)
        if root in self.leaf_taxon:
            # Two-leaf tree: a single edge.
            a, b = sorted((start_leaf, root), key=self.leaf_taxon.get)
            return "(%s,%s);" % (_render_label(label[a]), _render_label(label[b]))
        children = sorted(self.adj[root], key=lambda c: min_map[(c, root)])
        return "(" + ",".join(render(c, root) for c in children) + ");"


def parse_newick(text, universe=None):
    """Parse one or more semicolon-terminated Newick trees.

    With universe=None a fresh universe is built from the leaf labels
    in order of first appearance across all trees; otherwise every
    label must already belong to the given universe.

    Raises:
        NewickParseError: carrying kind, line and column.
    """
    builders = _Parser(text).parse_trees()
    if universe is None:
        ordered = []
        seen = set()
        for b in builders:
            for node in sorted(b.leaf_label):
                lab = b.leaf_label[node]
                if lab not in seen:
                    seen.add(lab)
                    ordered.append(lab)
        universe = TaxonUniverse(ordered)
    trees = []
    for b in builders:
        leaf_taxon = {}
        for node, lab in b.leaf_label.items():
            if lab not in universe:
                line, col = b.leaf_pos[node]
                raise NewickParseError(
                    "unknown-label",
                    "leaf label %r is not in the %d-taxon universe"
                    % (lab, len(universe)),
                    line,
                    col,
                )
            leaf_taxon[node] = universe.index_of(lab)
        adj = {node: set(nbrs) for node, nbrs in b.adj.items()}
        _cleanup(adj, leaf_taxon)
        trees.append(PhyloTree(universe, adj, leaf_taxon))
    return trees


def extract_splits(tree, include_trivial=True):
    """The partial splits realized by deleting one edge each.

    Each edge separates the leaves into two taxon sets, giving one
    partial split whose support is the tree's leaf set.  With
    include_trivial=False, splits with a singleton side are dropped.
    The result is reduced.
    """
    universe = tree.universe
    support = tree.leaf_taxa().mask
    if not tree.edges():
        return SplitSystem(universe, ())

    # One rooted pass: the split of edge (parent, child) has the leaf
    # taxa under child on one side and the rest of the support opposite.
    root = next(iter(tree.adj))
    below = {}
    order = []
    stack = [(root, None)]
    while stack:
        node, parent = stack.pop()
        order.append((node, parent))
        for c in tree.adj[node]:
            if c != parent:
                stack.append((c, node))
    for node, parent in reversed(order):
        mask = 1 << tree.leaf_taxon[node] if node in tree.leaf_taxon else 0
        for c in tree.adj[node]:
            if c != parent:
                mask |= below[c]
        below[node] = mask

    pairs = set()
    for node, parent in order:
        if parent is None:
            continue
        a = below[node]
        b = support & ~a
        if not a or not b:
            continue
        if not include_trivial and (a.bit_count() == 1 or b.bit_count() == 1):
            continue
        pairs.add(canon_pair(a, b))
    return SplitSystem.from_pairs(universe, pairs).reduce()


def prune(tree, drop):
    """Remove the given leaves and renormalize the tree.

    drop may be a TaxonSet or an iterable of labels; it must be a
    proper subset of the tree's leaf taxa (at least one leaf stays).
    """
    universe = tree.universe
    if isinstance(drop, TaxonSet):
        if drop.universe != universe:
            raise ValueError("drop set belongs to a different universe")
        drop_mask = drop.mask
    else:
        drop_mask = universe.set_of(drop).mask
    leaf_mask = tree.leaf_taxa().mask
    if drop_mask & ~leaf_mask:
        missing = TaxonSet(universe, drop_mask & ~leaf_mask)
        raise ValueError(
            "cannot prune %s: not leaves of this tree"
            % ",".join(missing.labels())
        )
    if drop_mask == leaf_mask:
        raise ValueError("pruning would remove every leaf")
    if drop_mask == 0:
        return tree

    adj = {node: set(nbrs) for node, nbrs in tree.adj.items()}
    leaf_taxon = dict(tree.leaf_taxon)
    for node, taxon in list(leaf_taxon.items()):
        if drop_mask >> taxon & 1:
            for u in adj[node]:
                adj[u].discard(node)
            del adj[node]
            del leaf_taxon[node]
    _cleanup(adj, leaf_taxon)
    return PhyloTree(universe, adj, leaf_taxon)
