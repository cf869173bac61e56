import pytest

from conftest import D_G_TRIPLES, encode_triples
from gsmat import qparser
from gsmat.errors import ParseError, UnsupportedFeatureError
from gsmat.qparser import (
    bind_constants,
    format_term,
    parse_ntriples_line,
    parse_query,
)


class TestNTriples:
    def test_plain_iris(self):
        line = "<http://e/A> <http://e/likes> <http://e/I1> ."
        assert parse_ntriples_line(line) == ("http://e/A", "http://e/likes", "http://e/I1")

    def test_comment_and_blank(self):
        assert parse_ntriples_line("# comment") is None
        assert parse_ntriples_line("   ") is None

    def test_arity_error(self):
        with pytest.raises(ParseError, match="line 3"):
            parse_ntriples_line("<a> <b>", lineno=3)

    def test_literal_forms(self):
        s, p, o = parse_ntriples_line('<a> <b> "hi\\nthere" .')
        assert o == '"hi\nthere"'
        _, _, o = parse_ntriples_line('<a> <b> "1"^^<http://www.w3.org/2001/XMLSchema#int> .')
        assert o == '"1"^^<http://www.w3.org/2001/XMLSchema#int>'
        _, _, o = parse_ntriples_line('<a> <b> "chat"@en .')
        assert o == '"chat"@en'

    def test_blank_nodes(self):
        assert parse_ntriples_line("_:b1 <p> _:b2 .") == ("_:b1", "p", "_:b2")

    def test_format_term_round_trip(self):
        for raw in ('<a>', '"x\\ty"', '"v"@en-GB', '_:n3'):
            line = f"<s> <p> {raw} ."
            _, _, o = parse_ntriples_line(line)
            assert parse_ntriples_line(f"<s> <p> {format_term(o)} .")[2] == o


class TestQueryParsing:
    def test_four_pattern_cycle_query(self, fig_query):
        assert len(fig_query.patterns) == 4
        assert fig_query.variables == {"?x", "?y", "?z", "?w"}
        assert fig_query.projection == ["?x", "?y", "?z", "?w"]
        assert [p.ordinal for p in fig_query.patterns] == [1, 2, 3, 4]
        assert fig_query.patterns[0] == qparser.TriplePattern("?x", ":follows", "?y", 1)

    def test_nine_pattern_star_query(self):
        text = """
        SELECT ?v0 ?v1 ?v2 ?v4 ?v5 ?v6 ?v7 ?v8
        WHERE {
          ?v0 <http://xmlns.com/foaf/homepage> ?v1 .
          ?v2 <http://purl.org/goodrelations/includes> ?v0 .
          ?v0 <http://ogp.me/ns#tag> ?v3 .
          ?v0 <http://schema.org/description> ?v4 .
          ?v0 <http://schema.org/contentSize> ?v8 .
          ?v1 <http://schema.org/url> ?v5 .
          ?v1 <http://db.uwaterloo.ca/#galuc/wsdbm/hits> ?v6 .
          ?v1 <http://schema.org/language> ?v9 .
          ?v7 <http://db.uwaterloo.ca/#galuc/wsdbm/likes> ?v0 .
        }
        """
        graph = parse_query(text)
        assert len(graph.patterns) == 9
        assert len(graph.variables) == 10
        assert len(graph.projection) == 8

    def test_variable_predicate_rejected(self):
        with pytest.raises(UnsupportedFeatureError):
            parse_query("SELECT ?x WHERE { ?x ?p ?y . }")

    def test_prefix_expansion(self):
        graph = parse_query(
            "PREFIX ex: <http://e/> SELECT ?a WHERE { ?a ex:knows ex:bob . }"
        )
        assert graph.patterns[0].p == "http://e/knows"
        assert graph.patterns[0].o == "http://e/bob"

    def test_unknown_prefix(self):
        with pytest.raises(ParseError, match="unknown prefix"):
            parse_query("SELECT ?a WHERE { ?a ex:p ?b . }")

    def test_select_star_and_distinct(self):
        graph = parse_query("SELECT DISTINCT * WHERE { ?b <p> ?a . ?a <q> ?c }")
        assert graph.distinct
        assert graph.projection == ["?b", "?a", "?c"]

    def test_unbound_projection_rejected(self):
        with pytest.raises(ParseError, match=r"\?z"):
            parse_query("SELECT ?z WHERE { ?x <p> ?y . }")

    def test_syntax_errors(self):
        with pytest.raises(ParseError):
            parse_query("SELECT ?x WHERE { ?x <p> }")
        with pytest.raises(ParseError):
            parse_query("FROB ?x WHERE { ?x <p> ?y . }")

    def test_reparse_serialized_patterns(self, fig_query):
        body = " . ".join(p.text() for p in fig_query.patterns)
        again = parse_query(f"SELECT ?x ?y ?z ?w WHERE {{ {body} . }}")
        assert again.patterns == fig_query.patterns


class TestBindConstants:
    def test_binds_known_constants(self):
        dictionary, _ = encode_triples(D_G_TRIPLES)
        graph = parse_query("SELECT ?a ?b WHERE { ?a <:follows> ?b . <A> <:likes> ?b . }")
        encoded = bind_constants(graph, dictionary)
        assert encoded.patterns[0].p == 2
        assert encoded.patterns[1].s == 1
        assert not encoded.patterns[0].empty

    def test_unknown_constant_flags_empty(self):
        dictionary, _ = encode_triples(D_G_TRIPLES)
        graph = parse_query("SELECT ?b WHERE { <Z> <:likes> ?b . }")
        encoded = bind_constants(graph, dictionary)
        assert encoded.patterns[0].empty

    def test_unknown_predicate_flags_empty(self):
        dictionary, _ = encode_triples(D_G_TRIPLES)
        graph = parse_query("SELECT ?a ?b WHERE { ?a <:unknown> ?b . }")
        assert bind_constants(graph, dictionary).patterns[0].empty
