# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled backend: same functions and bit-exact behavior as ``_pure``.

Keep the two implementations in lockstep; ``tests/test_backends.py`` checks
agreement on random inputs.
"""

from math import isqrt

cdef int T_PROJ = 0
cdef int T_LIT = 1
cdef int T_PAIR = 2
cdef int T_FST = 3
cdef int T_SND = 4
cdef int T_COMP = 5
cdef int T_IF0 = 6
cdef int T_SUCC = 7
cdef int T_SMN = 8
cdef int T_CONST = 9
cdef int T_APPLY = 10

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


cdef class _Writer:
    cdef list chunks

    def __cinit__(self):
        self.chunks = []

    cdef void put(self, v, Py_ssize_t width):
        self.chunks.append((v, width))

    cdef void put_gamma(self, Py_ssize_t n):
        cdef Py_ssize_t m = n + 1
        cdef Py_ssize_t b = (<object> m).bit_length()
        if b > 1:
            self.put((1 << (b - 1)) - 1, b - 1)
        self.put(0, 1)
        if b > 1:
            self.put(m & ((1 << (b - 1)) - 1), b - 1)

    cdef void put_number(self, v):
        cdef Py_ssize_t w = v.bit_length()
        self.put_gamma(w)
        if w:
            self.put(v, w)

    cdef object to_int(self):
        chunks = self.chunks
        cdef Py_ssize_t i
        while len(chunks) > 1:
            merged = []
            for i in range(0, len(chunks) - 1, 2):
                v1, w1 = chunks[i]
                v2, w2 = chunks[i + 1]
                merged.append((v1 | (v2 << w1), w1 + w2))
            if len(chunks) % 2:
                merged.append(chunks[-1])
            chunks = merged
        return chunks[0][0] if chunks else 0


cdef class _Reader:
    cdef object code
    cdef bytes buf
    cdef Py_ssize_t nbits
    cdef Py_ssize_t pos

    def __cinit__(self, code):
        self.code = code
        self.nbits = code.bit_length()
        self.buf = code.to_bytes((self.nbits + 7) // 8 or 1, "little")
        self.pos = 0

    cdef object get(self, Py_ssize_t width):
        cdef Py_ssize_t pos, lo, hi
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

    cdef Py_ssize_t get_gamma(self):
        cdef Py_ssize_t count = 0
        while self.pos < self.nbits and self.get(1) == 1:
            count += 1
        m = self.get(count) | (1 << count)
        return m - 1

    cdef object get_number(self):
        return self.get(self.get_gamma())

    cdef object remainder(self):
        if self.pos >= self.nbits:
            self.pos = self.nbits
            return 0
        val = self.code >> self.pos
        self.pos = self.nbits
        return val


cdef void _encode_node(_Writer w, tuple t) except *:
    cdef int tag = t[0]
    w.put(tag, 4)
    if tag == T_PROJ:
        w.put_number(t[1] - 1)
    elif tag == T_LIT:
        w.put_number(t[1])
    elif tag == T_PAIR or tag == T_SMN or tag == T_APPLY:
        _encode_node(w, t[1])
        _encode_node(w, t[2])
    elif tag == T_FST or tag == T_SND or tag == T_SUCC or tag == T_CONST:
        _encode_node(w, t[1])
    elif tag == T_COMP:
        _encode_node(w, t[1])
        for arg in t[2]:
            w.put(1, 1)
            _encode_node(w, arg)
        w.put(0, 1)
    elif tag == T_IF0:
        _encode_node(w, t[1])
        _encode_node(w, t[2])
        _encode_node(w, t[3])
    else:
        raise ValueError(f"bad tag {tag}")


def encode_ast(t):
    cdef _Writer w = _Writer()
    _encode_node(w, t)
    return w.to_int()


cdef tuple _decode_node(_Reader r, bint total):
    cdef int tag = r.get(4)
    cdef list args
    if tag == T_PROJ:
        return (T_PROJ, r.get_number() + 1)
    if tag == T_LIT:
        return (T_LIT, r.get_number())
    if tag == T_PAIR or tag == T_SMN or tag == T_APPLY:
        p = _decode_node(r, total)
        q = _decode_node(r, total)
        if tag == T_APPLY and total:
            return (T_LIT, 0)
        return (tag, p, q)
    if tag == T_FST or tag == T_SND or tag == T_SUCC or tag == T_CONST:
        return (tag, _decode_node(r, total))
    if tag == T_COMP:
        head = _decode_node(r, total)
        args = []
        while r.get(1) == 1:
            args.append(_decode_node(r, total))
        return (T_COMP, head, tuple(args))
    if tag == T_IF0:
        a = _decode_node(r, total)
        b = _decode_node(r, total)
        c = _decode_node(r, total)
        return (T_IF0, a, b, c)
    return (T_LIT, r.remainder())


def decode_ast(code, total):
    return _decode_node(_Reader(code), total)


cdef tuple _decode_cached(code, bint total, dict cache):
    node = cache.get(code)
    if node is None:
        node = _decode_node(_Reader(code), total)
        if len(cache) > 200000:
            cache.clear()
        cache[code] = node
    return node


def specialize_last(code, arity, k, total, cache):
    cdef tuple inner = _decode_cached(code, total, cache)
    cdef Py_ssize_t i
    if arity <= 0:
        return code
    args = tuple([(T_PROJ, i) for i in range(1, arity)]) + ((T_LIT, k),)
    return encode_ast((T_COMP, inner, args))


cdef tuple _ev(tuple t, tuple args, fuel, bint total, dict cache):
    cdef int tag
    cdef Py_ssize_t i
    cdef list vals
    if fuel <= 0:
        return (OUT_OF_FUEL, 0, 0)
    fuel = fuel - 1
    tag = t[0]
    if tag == T_PROJ:
        i = t[1]
        if i <= len(args):
            return (OK, args[i - 1], fuel)
        if total:
            return (OK, 0, fuel)
        return (DIVERGED, 0, fuel)
    if tag == T_LIT:
        return (OK, t[1], fuel)
    if tag == T_PAIR:
        st, a, fuel = _ev(t[1], args, fuel, total, cache)
        if st:
            return (st, 0, fuel)
        st, b, fuel = _ev(t[2], args, fuel, total, cache)
        if st:
            return (st, 0, fuel)
        return (OK, pair(a, b), fuel)
    if tag == T_FST:
        st, v, fuel = _ev(t[1], args, fuel, total, cache)
        if st:
            return (st, 0, fuel)
        return (OK, unpair(v)[0], fuel)
    if tag == T_SND:
        st, v, fuel = _ev(t[1], args, fuel, total, cache)
        if st:
            return (st, 0, fuel)
        return (OK, unpair(v)[1], fuel)
    if tag == T_COMP:
        vals = []
        for sub in t[2]:
            st, v, fuel = _ev(sub, args, fuel, total, cache)
            if st:
                return (st, 0, fuel)
            vals.append(v)
        return _ev(t[1], tuple(vals), fuel, total, cache)
    if tag == T_IF0:
        st, c, fuel = _ev(t[1], args, fuel, total, cache)
        if st:
            return (st, 0, fuel)
        return _ev(t[2] if c == 0 else t[3], args, fuel, total, cache)
    if tag == T_SUCC:
        st, v, fuel = _ev(t[1], args, fuel, total, cache)
        if st:
            return (st, 0, fuel)
        return (OK, v + 1, fuel)
    if tag == T_SMN:
        st, vp, fuel = _ev(t[1], args, fuel, total, cache)
        if st:
            return (st, 0, fuel)
        st, vq, fuel = _ev(t[2], args, fuel, total, cache)
        if st:
            return (st, 0, fuel)
        arity, code = unpair(vp)
        return (OK, specialize_last(code, arity, vq, total, cache), fuel)
    if tag == T_CONST:
        st, v, fuel = _ev(t[1], args, fuel, total, cache)
        if st:
            return (st, 0, fuel)
        return (OK, encode_ast((T_LIT, v)), fuel)
    if tag == T_APPLY:
        st, vp, fuel = _ev(t[1], args, fuel, total, cache)
        if st:
            return (st, 0, fuel)
        st, vq, fuel = _ev(t[2], args, fuel, total, cache)
        if st:
            return (st, 0, fuel)
        callee = _decode_cached(vp, total, cache)
        return _ev(callee, (vq,), fuel, total, cache)
    raise ValueError(f"bad tag {tag}")


def eval_ast(t, args, fuel, total, cache):
    return _ev(t, args, fuel, total, cache)


def eval_code(code, args, fuel, total, cache):
    return _ev(_decode_cached(code, total, cache), args, fuel, total, cache)
