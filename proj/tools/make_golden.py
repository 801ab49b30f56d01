#!/usr/bin/env python3
#
# Copyright 2026 The ofhsim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Hand-assembles the codec golden vectors bit by bit, without touching the C++ encoder.

Usage: make_golden.py OUTDIR
"""

import pathlib
import struct
import sys


def ecpri(msg_type, eaxc, seq, payload):
    # version 1, no concatenation; payload_size counts everything after the first 4 bytes
    body = struct.pack(">HBB", eaxc, seq, 0x80) + payload
    return bytes([0x10, msg_type]) + struct.pack(">H", len(body)) + body


def app_header(direction, filter_index, frame_id, subframe, slot, start_symbol):
    b0 = (direction << 7) | (1 << 4) | filter_index
    b2 = (subframe << 4) | (slot >> 2)
    b3 = ((slot & 0x3) << 6) | start_symbol
    return bytes([b0, frame_id, b2, b3])


def comp_hdr(width, meth):
    return (0 if width == 16 else width) << 4 | meth


def section_id_field(section_id, rb, sym_inc, start_prb):
    v = (section_id << 12) | (rb << 11) | (sym_inc << 10) | start_prb
    return v.to_bytes(3, "big")


def pack_bits(values, width):
    acc = 0
    nbits = 0
    for v in values:
        acc = (acc << width) | (v & ((1 << width) - 1))
        nbits += width
    pad = (-nbits) % 8
    return (acc << pad).to_bytes((nbits + pad) // 8, "big")


def cplane_type1():
    common = app_header(1, 0, 0, 0, 0, 0) + bytes([1, 1, comp_hdr(9, 1), 0])
    section = (section_id_field(1, 0, 0, 0) + bytes([51]) +
               struct.pack(">HH", (0xFFF << 4) | 14, 0))
    return ecpri(0x02, 0x0000, 0, common + section)


def cplane_type3():
    # UL PRACH: frame 5, subframe 9, slot 1, symbol 0; eAxC du_port 1 / ru_port 1 under 4/4/4/4
    eaxc = (1 << 12) | 1
    common = app_header(0, 1, 5, 9, 1, 0) + bytes([1, 3, comp_hdr(9, 1), 0])
    fo = (-612) & 0xFFFFFF
    section = (section_id_field(0x200, 0, 0, 0) + bytes([12]) +
               struct.pack(">HH", (0xFFF << 4) | 12, 0) +
               fo.to_bytes(3, "big") + bytes([0]) +
               struct.pack(">HBH", 0, 0, 0) + bytes([0]))
    return ecpri(0x02, eaxc, 17, common + section)


def uplane_mantissas():
    return [20 * i - 240 for i in range(24)]


def uplane_none():
    iq = [1000 * (i - 12) for i in range(24)]
    data = b"".join(struct.pack(">h", v) for v in iq)
    section = section_id_field(1, 0, 0, 7) + bytes([1, comp_hdr(16, 0), 0]) + data
    return ecpri(0x00, 0x0001, 3, app_header(1, 0, 2, 3, 1, 6) + section)


def uplane_bfp9():
    data = bytes([3]) + pack_bits(uplane_mantissas(), 9)
    section = section_id_field(1, 0, 0, 7) + bytes([1, comp_hdr(9, 1), 0]) + data
    return ecpri(0x00, 0x0001, 4, app_header(1, 0, 2, 3, 1, 6) + section)


VECTORS = [
    ("cplane_type1.bin", cplane_type1,
     "C-plane type 1, DL, eAxC 0, seq 0, frame 0 sf 0 slot 0 sym 0; one section id 1, PRBs 0..50, "
     "re_mask 0xfff, 14 symbols, beam 0; BFP width 9"),
    ("cplane_type3.bin", cplane_type3,
     "C-plane type 3, UL PRACH filter, eAxC 0x1001, seq 17, frame 5 sf 9 slot 1 sym 0; section id 0x200, "
     "PRBs 0..11, 12 symbols, freq_offset -612; BFP width 9"),
    ("uplane_none.bin", uplane_none,
     "U-plane, DL, eAxC 1, seq 3, frame 2 sf 3 slot 1 sym 6; section id 1, PRB 7, uncompressed, "
     "IQ values 1000*(i-12) for i in 0..23"),
    ("uplane_bfp9.bin", uplane_bfp9,
     "U-plane, DL, eAxC 1, seq 4, frame 2 sf 3 slot 1 sym 6; section id 1, PRB 7, BFP width 9, exponent 3, "
     "mantissas 20*i-240 for i in 0..23"),
]


def main():
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "testdata")
    out.mkdir(parents=True, exist_ok=True)
    lines = ["# file  bytes  hex  description"]
    for name, build, text in VECTORS:
        data = build()
        (out / name).write_bytes(data)
        lines.append(f"{name}  {len(data)}  {data.hex()}  {text}")
    (out / "MANIFEST.txt").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
