"""Tokenizer for the supported Verilog subset."""

from __future__ import annotations

from dataclasses import dataclass

from sentaur.errors import RtlSyntaxError, UnsupportedConstruct

KEYWORDS = {
    "module",
    "endmodule",
    "input",
    "output",
    "wire",
    "reg",
    "localparam",
    "assign",
    "always",
    "posedge",
    "begin",
    "end",
    "if",
    "else",
    "case",
    "endcase",
    "default",
    "or",
}

# Verilog constructs we recognize but refuse: naming them gives a precise
# UnsupportedConstruct instead of a confusing syntax error.
UNSUPPORTED_KEYWORDS = {
    "initial",
    "negedge",
    "inout",
    "parameter",
    "defparam",
    "generate",
    "endgenerate",
    "genvar",
    "task",
    "endtask",
    "function",
    "endfunction",
    "integer",
    "real",
    "realtime",
    "time",
    "for",
    "while",
    "repeat",
    "forever",
    "casex",
    "casez",
    "fork",
    "join",
    "signed",
    "specify",
    "endspecify",
    "wait",
    "deassign",
    "force",
    "release",
    "event",
    "tri",
    "tri0",
    "tri1",
    "wand",
    "wor",
    "supply0",
    "supply1",
    "macromodule",
    "primitive",
    "endprimitive",
    "table",
    "endtable",
    "disable",
    "edge",
    "scalared",
    "vectored",
    "small",
    "medium",
    "large",
    "highz0",
    "highz1",
    "pullup",
    "pulldown",
}

# Multi-char operators first so maximal munch works.
OPERATORS = [
    "&&",
    "||",
    "==",
    "!=",
    "<=",
    ">=",
    "<",
    ">",
    "+",
    "-",
    "&",
    "|",
    "^",
    "~",
    "!",
    "=",
    "?",
    ":",
    ",",
    ";",
    ".",
    "@",
    "*",
    "(",
    ")",
    "[",
    "]",
    "{",
    "}",
]


@dataclass(frozen=True)
class Token:
    kind: str  # "id", "kw", "num", "op", "eof"
    text: str
    line: int
    col: int
    # for "num": (value, width or None, base char)
    value: tuple | None = None


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def advance(k: int):
        nonlocal i, line, col
        for _ in range(k):
            if source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = source[i]
        if c in " \t\r\n":
            advance(1)
            continue
        if source.startswith("//", i):
            j = source.find("\n", i)
            advance((j - i) if j != -1 else (n - i))
            continue
        if source.startswith("/*", i):
            j = source.find("*/", i)
            if j == -1:
                raise RtlSyntaxError(line, col, "closing */")
            advance(j + 2 - i)
            continue
        if c == "#":
            raise UnsupportedConstruct("delay (#)", line, col)
        if c == "`":
            raise UnsupportedConstruct("compiler directive (`)", line, col)
        if c == "$":
            raise UnsupportedConstruct("system task ($)", line, col)
        if c.isdigit():
            tok_line, tok_col = line, col
            j = i
            while j < n and (source[j].isdigit() or source[j] == "_"):
                j += 1
            digits = source[i:j].replace("_", "")
            if j < n and source[j] == "'":
                width = int(digits)
                if width < 1:
                    raise RtlSyntaxError(tok_line, tok_col, "literal width >= 1")
                j += 1
                if j >= n:
                    raise RtlSyntaxError(line, col, "literal base after '")
                base = source[j].lower()
                j += 1
                if base not in ("h", "b", "d"):
                    raise UnsupportedConstruct(f"literal base '{base}", tok_line, tok_col)
                k = j
                while k < n and (source[k].isalnum() or source[k] == "_"):
                    k += 1
                body = source[j:k].replace("_", "")
                if not body:
                    raise RtlSyntaxError(tok_line, tok_col, "literal digits")
                try:
                    value = int(body, {"h": 16, "b": 2, "d": 10}[base])
                except ValueError:
                    raise RtlSyntaxError(tok_line, tok_col, f"valid base-{base} digits")
                if value >= (1 << width):
                    raise RtlSyntaxError(
                        tok_line, tok_col, f"value fitting in {width} bits"
                    )
                text = source[i:k]
                tokens.append(Token("num", text, tok_line, tok_col, (value, width, base)))
                advance(k - i)
            else:
                tokens.append(
                    Token("num", source[i:j], tok_line, tok_col, (int(digits), None, "d"))
                )
                advance(j - i)
            continue
        if c == "'":
            raise RtlSyntaxError(line, col, "sized literal (width before ')")
        if c.isalpha() or c == "_":
            tok_line, tok_col = line, col
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_" or source[j] == "$"):
                j += 1
            word = source[i:j]
            if "$" in word:
                raise UnsupportedConstruct(word, tok_line, tok_col)
            if word in UNSUPPORTED_KEYWORDS:
                raise UnsupportedConstruct(word, tok_line, tok_col)
            kind = "kw" if word in KEYWORDS else "id"
            tokens.append(Token(kind, word, tok_line, tok_col))
            advance(j - i)
            continue
        matched = None
        for op in OPERATORS:
            if source.startswith(op, i):
                matched = op
                break
        if matched is None:
            raise RtlSyntaxError(line, col, f"token (got {c!r})")
        tokens.append(Token("op", matched, line, col))
        advance(len(matched))

    tokens.append(Token("eof", "", line, col))
    return tokens
