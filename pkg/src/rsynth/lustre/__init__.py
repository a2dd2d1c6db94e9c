"""Front end for Lustre-style contract nodes."""
from .ast import Program, Node, pretty, pretty_node, pretty_expr
from .parser import LustreSyntaxError, parse, parse_file, tokenize
from .elaborate import ElaborationError, elaborate, load_contract

__all__ = [
    "Program", "Node", "pretty", "pretty_node", "pretty_expr",
    "LustreSyntaxError", "parse", "parse_file", "tokenize",
    "ElaborationError", "elaborate", "load_contract",
]
