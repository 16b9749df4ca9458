"""Pure-Python backend: pairing, program numbering, and the evaluator.

This module is the reference implementation of the hot kernel.  A compiled
twin (``realizekit._speed``) implements the same functions; the public
``realizekit.kernel`` module picks one at import time.

Programs are handled here in *tuple form*: every node is a tuple whose first
element is an integer tag.

    (0, i)            projection onto argument i (1-based)
    (1, k)            literal natural k
    (2, l, r)         pair of two subterms (Cantor pairing)
    (3, c)            first projection of a pair
    (4, c)            second projection of a pair
    (5, head, args)   composition: run ``head`` on the values of ``args``
    (6, c, t, e)      zero test: value of t if c evaluates to 0, else e
    (7, c)            successor
    (8, p, q)         code specialization: p evaluates to pair(arity, code),
                      q to a value; yields the code of that program with its
                      last declared argument fixed to the value
    (9, c)            constant code: yields the code of the program that
                      returns the value of c on any arguments
    (10, p, q)        apply: run the program coded by the value of p on the
                      single argument given by the value of q

The numbering is a total decoding of naturals onto programs.  A code is read
as an LSB-first bit stream: a 4-bit tag, then the payload.  Numbers inside
the stream are length-prefixed (Elias-gamma length, then raw bits), argument
lists use one marker bit per element, and the stream is implicitly padded
with zeros, so every natural decodes.  Tags 11-15 normalize to a literal
whose value is the remaining stream.  Sizes stay linear in the program tree,
which keeps codes of large composed programs manageable.
"""

from math import isqrt

TAG_PROJ = 0
TAG_LIT = 1
TAG_PAIR = 2
TAG_FST = 3
TAG_SND = 4
TAG_COMP = 5
TAG_IF0 = 6
TAG_SUCC = 7
TAG_SMN = 8
TAG_CONST = 9
TAG_APPLY = 10

OK = 0
OUT_OF_FUEL = 1
DIVERGED = 2


def pair(a, b):
    s = a + b
    return s * (s + 1) // 2 + a


def unpair(n):
    w = (isqrt(8 * n + 1) - 1) // 2
    a = n - w * (w + 1) // 2
    return a, w - a


def proj1(n):
    return unpair(n)[0]


def proj2(n):
    return unpair(n)[1]


class _Writer:
    """Append-only bit accumulator; chunks are merged pairwise at the end."""

    def __init__(self):
        self.chunks = []

    def put(self, value, width):
        self.chunks.append((value, width))

    def put_gamma(self, n):
        # Elias-gamma of n+1, LSB-first: (b-1) one-bits, a zero, then the
        # low b-1 bits of n+1.
        m = n + 1
        b = m.bit_length()
        if b > 1:
            self.put((1 << (b - 1)) - 1, b - 1)
        self.put(0, 1)
        if b > 1:
            self.put(m & ((1 << (b - 1)) - 1), b - 1)

    def put_number(self, v):
        w = v.bit_length()
        self.put_gamma(w)
        if w:
            self.put(v, w)

    def to_int(self):
        chunks = self.chunks
        while len(chunks) > 1:
            merged = []
            for i in range(0, len(chunks) - 1, 2):
                (v1, w1), (v2, w2) = chunks[i], chunks[i + 1]
                merged.append((v1 | (v2 << w1), w1 + w2))
            if len(chunks) % 2:
                merged.append(chunks[-1])
            chunks = merged
        return chunks[0][0] if chunks else 0


class _Reader:
    def __init__(self, code):
        self.code = code
        self.nbits = code.bit_length()
        self.buf = code.to_bytes((self.nbits + 7) // 8 or 1, "little")
        self.pos = 0

    def get(self, width):
        if width == 0:
            return 0
        pos = self.pos
        self.pos = pos + width
        if pos >= self.nbits:
            return 0
        lo = pos // 8
        hi = (pos + width + 7) // 8
        val = int.from_bytes(self.buf[lo:hi], "little") >> (pos % 8)
        return val & ((1 << width) - 1)

    def get_gamma(self):
        # Past the significant bits every read is 0, so the unary scan
        # always terminates on the implicit zero padding.
        count = 0
        while self.pos < self.nbits and self.get(1) == 1:
            count += 1
        m = self.get(count) | (1 << count)
        return m - 1

    def get_number(self):
        return self.get(self.get_gamma())

    def remainder(self):
        if self.pos >= self.nbits:
            self.pos = self.nbits
            return 0
        val = self.code >> self.pos
        self.pos = self.nbits
        return val


def _encode_node(w, t):
    tag = t[0]
    w.put(tag, 4)
    if tag == TAG_PROJ:
        w.put_number(t[1] - 1)
    elif tag == TAG_LIT:
        w.put_number(t[1])
    elif tag in (TAG_PAIR, TAG_SMN, TAG_APPLY):
        _encode_node(w, t[1])
        _encode_node(w, t[2])
    elif tag in (TAG_FST, TAG_SND, TAG_SUCC, TAG_CONST):
        _encode_node(w, t[1])
    elif tag == TAG_COMP:
        _encode_node(w, t[1])
        for arg in t[2]:
            w.put(1, 1)
            _encode_node(w, arg)
        w.put(0, 1)
    elif tag == TAG_IF0:
        _encode_node(w, t[1])
        _encode_node(w, t[2])
        _encode_node(w, t[3])
    else:
        raise ValueError(f"bad tag {tag}")


def encode_ast(t):
    w = _Writer()
    _encode_node(w, t)
    return w.to_int()


def _decode_node(r, total):
    tag = r.get(4)
    if tag == TAG_PROJ:
        return (TAG_PROJ, r.get_number() + 1)
    if tag == TAG_LIT:
        return (TAG_LIT, r.get_number())
    if tag in (TAG_PAIR, TAG_SMN, TAG_APPLY):
        p = _decode_node(r, total)
        q = _decode_node(r, total)
        if tag == TAG_APPLY and total:
            return (TAG_LIT, 0)
        return (tag, p, q)
    if tag in (TAG_FST, TAG_SND, TAG_SUCC, TAG_CONST):
        return (tag, _decode_node(r, total))
    if tag == TAG_COMP:
        head = _decode_node(r, total)
        args = []
        while r.get(1) == 1:
            args.append(_decode_node(r, total))
        return (TAG_COMP, head, tuple(args))
    if tag == TAG_IF0:
        a = _decode_node(r, total)
        b = _decode_node(r, total)
        c = _decode_node(r, total)
        return (TAG_IF0, a, b, c)
    # Tags 11-15 normalize to a literal holding the rest of the stream.
    return (TAG_LIT, r.remainder())


def decode_ast(code, total):
    return _decode_node(_Reader(code), total)


def specialize_last(code, arity, k, total, cache):
    """Code of the program behaving as ``code`` at ``arity`` with its last
    argument fixed to ``k``.  Exact for every code at the declared arity."""
    inner = _decode_cached(code, total, cache)
    if arity <= 0:
        return code
    args = tuple((TAG_PROJ, i) for i in range(1, arity)) + ((TAG_LIT, k),)
    return encode_ast((TAG_COMP, inner, args))


def _decode_cached(code, total, cache):
    node = cache.get(code)
    if node is None:
        node = _decode_node(_Reader(code), total)
        if len(cache) > 200000:
            cache.clear()
        cache[code] = node
    return node


def eval_ast(t, args, fuel, total, cache):
    """Evaluate tuple-form ``t`` on ``args``.  Returns (status, value, fuel).

    Each node entered costs one fuel unit.  Out-of-range projections diverge
    in the partial model and return 0 in the total model.
    """
    if fuel <= 0:
        return OUT_OF_FUEL, 0, 0
    fuel -= 1
    tag = t[0]
    if tag == TAG_PROJ:
        i = t[1]
        if i <= len(args):
            return OK, args[i - 1], fuel
        if total:
            return OK, 0, fuel
        return DIVERGED, 0, fuel
    if tag == TAG_LIT:
        return OK, t[1], fuel
    if tag == TAG_PAIR:
        st, a, fuel = eval_ast(t[1], args, fuel, total, cache)
        if st:
            return st, 0, fuel
        st, b, fuel = eval_ast(t[2], args, fuel, total, cache)
        if st:
            return st, 0, fuel
        return OK, pair(a, b), fuel
    if tag == TAG_FST:
        st, v, fuel = eval_ast(t[1], args, fuel, total, cache)
        if st:
            return st, 0, fuel
        return OK, unpair(v)[0], fuel
    if tag == TAG_SND:
        st, v, fuel = eval_ast(t[1], args, fuel, total, cache)
        if st:
            return st, 0, fuel
        return OK, unpair(v)[1], fuel
    if tag == TAG_COMP:
        vals = []
        for sub in t[2]:
            st, v, fuel = eval_ast(sub, args, fuel, total, cache)
            if st:
                return st, 0, fuel
            vals.append(v)
        return eval_ast(t[1], tuple(vals), fuel, total, cache)
    if tag == TAG_IF0:
        st, c, fuel = eval_ast(t[1], args, fuel, total, cache)
        if st:
            return st, 0, fuel
        return eval_ast(t[2] if c == 0 else t[3], args, fuel, total, cache)
    if tag == TAG_SUCC:
        st, v, fuel = eval_ast(t[1], args, fuel, total, cache)
        if st:
            return st, 0, fuel
        return OK, v + 1, fuel
    if tag == TAG_SMN:
        st, vp, fuel = eval_ast(t[1], args, fuel, total, cache)
        if st:
            return st, 0, fuel
        st, vq, fuel = eval_ast(t[2], args, fuel, total, cache)
        if st:
            return st, 0, fuel
        arity, code = unpair(vp)
        return OK, specialize_last(code, arity, vq, total, cache), fuel
    if tag == TAG_CONST:
        st, v, fuel = eval_ast(t[1], args, fuel, total, cache)
        if st:
            return st, 0, fuel
        return OK, encode_ast((TAG_LIT, v)), fuel
    if tag == TAG_APPLY:
        st, vp, fuel = eval_ast(t[1], args, fuel, total, cache)
        if st:
            return st, 0, fuel
        st, vq, fuel = eval_ast(t[2], args, fuel, total, cache)
        if st:
            return st, 0, fuel
        callee = _decode_cached(vp, total, cache)
        return eval_ast(callee, (vq,), fuel, total, cache)
    raise ValueError(f"bad tag {tag}")


def eval_code(code, args, fuel, total, cache):
    return eval_ast(_decode_cached(code, total, cache), args, fuel, total, cache)
