"""Standalone DOT grammar checker used as an oracle by the acceptance suite.

Implements the published DOT language grammar (graph / stmt_list / stmt /
attr_stmt / attr_list / a_list / edge_stmt / edgeRHS / node_stmt / node_id /
port / subgraph) with pyparsing.  Independent of the package's DOT writer.
"""

import pyparsing as pp


def build_dot_parser():
    LBRACE, RBRACE, LBRACK, RBRACK = map(pp.Suppress, "{}[]")
    EQ = pp.Suppress("=")
    SEMI = pp.Suppress(";")
    COLON = pp.Suppress(":")

    ident = pp.Word(pp.alphas + "_", pp.alphanums + "_")
    numeral = pp.Regex(r"-?(\.\d+|\d+(\.\d*)?)")
    quoted = pp.QuotedString('"', esc_char="\\", unquote_results=False)
    dot_id = quoted | numeral | ident

    port = COLON + dot_id + pp.Optional(COLON + dot_id)
    node_id = dot_id + pp.Optional(port)

    a_list = pp.Forward()
    a_list <<= (
        dot_id + EQ + dot_id
        + pp.Optional(pp.Suppress(pp.one_of("; ,")))
        + pp.Optional(a_list)
    )
    attr_list = pp.Forward()
    attr_list <<= LBRACK + pp.Optional(a_list) + RBRACK + pp.Optional(attr_list)

    stmt_list = pp.Forward()
    subgraph = (
        pp.Optional(pp.CaselessKeyword("subgraph") + pp.Optional(dot_id))
        + LBRACE + stmt_list + RBRACE
    )
    endpoint = subgraph | node_id
    edge_rhs = pp.OneOrMore(pp.one_of("-- ->") + endpoint)
    edge_stmt = endpoint + edge_rhs + pp.Optional(attr_list)
    node_stmt = node_id + pp.Optional(attr_list)
    attr_stmt = (
        pp.CaselessKeyword("graph") | pp.CaselessKeyword("node") | pp.CaselessKeyword("edge")
    ) + attr_list
    assignment = dot_id + EQ + dot_id
    stmt = attr_stmt | assignment | edge_stmt | node_stmt | subgraph
    stmt_list <<= pp.ZeroOrMore(stmt + pp.Optional(SEMI))

    graph = (
        pp.Optional(pp.CaselessKeyword("strict"))
        + (pp.CaselessKeyword("graph") | pp.CaselessKeyword("digraph"))
        + pp.Optional(dot_id)
        + LBRACE + stmt_list + RBRACE
        + pp.StringEnd()
    )
    graph.ignore(pp.c_style_comment)
    graph.ignore(pp.dbl_slash_comment)
    return graph


_PARSER = None


def check_dot(text: str) -> bool:
    """True iff the text is a well-formed DOT graph; raises on syntax errors."""
    global _PARSER
    if _PARSER is None:
        _PARSER = build_dot_parser()
    _PARSER.parse_string(text, parse_all=True)
    return True
