/**
 * Minimal PNG writer: 8-bit truecolor RGB, no interlace, every scanline
 * filter type 0 (None), and the IDAT zlib stream built from *stored*
 * (uncompressed) deflate blocks.
 *
 * Stored blocks make the emitted bytes a pure function of the pixel data:
 * no compressor is involved, so the output never shifts under a zlib or
 * runtime upgrade.  The files are larger than compressed PNGs but decode
 * everywhere.
 */

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let i = 0; i < 256; i++) {
    let c = i;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[i] = c >>> 0;
  }
  return table;
})();

export function crc32(data: Uint8Array): number {
  let c = 0xffffffff;
  for (let i = 0; i < data.length; i++) {
    c = CRC_TABLE[(c ^ data[i]!) & 0xff]! ^ (c >>> 8);
  }
  return (c ^ 0xffffffff) >>> 0;
}

export function adler32(data: Uint8Array): number {
  const MOD = 65521;
  let a = 1;
  let b = 0;
  for (let i = 0; i < data.length; i++) {
    a = (a + data[i]!) % MOD;
    b = (b + a) % MOD;
  }
  return ((b << 16) | a) >>> 0;
}

function u32be(v: number): Uint8Array {
  return new Uint8Array([(v >>> 24) & 0xff, (v >>> 16) & 0xff, (v >>> 8) & 0xff, v & 0xff]);
}

function chunk(type: string, data: Uint8Array): Uint8Array {
  const typeBytes = new TextEncoder().encode(type);
  const body = new Uint8Array(typeBytes.length + data.length);
  body.set(typeBytes, 0);
  body.set(data, typeBytes.length);
  const out = new Uint8Array(4 + body.length + 4);
  out.set(u32be(data.length), 0);
  out.set(body, 4);
  out.set(u32be(crc32(body)), 4 + body.length);
  return out;
}

/** zlib wrapper around stored-only deflate blocks. */
export function zlibStored(raw: Uint8Array): Uint8Array {
  const MAX = 65535;
  const nBlocks = Math.max(1, Math.ceil(raw.length / MAX));
  const out = new Uint8Array(2 + nBlocks * 5 + raw.length + 4);
  let o = 0;
  out[o++] = 0x78; // CM=8, CINFO=7
  out[o++] = 0x01; // FCHECK makes (0x7801 % 31) == 0, no dict, fastest level
  for (let b = 0; b < nBlocks; b++) {
    const start = b * MAX;
    const len = Math.min(MAX, raw.length - start);
    out[o++] = b === nBlocks - 1 ? 1 : 0; // BFINAL, BTYPE=00 (stored)
    out[o++] = len & 0xff;
    out[o++] = (len >>> 8) & 0xff;
    out[o++] = ~len & 0xff;
    out[o++] = (~len >>> 8) & 0xff;
    out.set(raw.subarray(start, start + len), o);
    o += len;
  }
  out.set(u32be(adler32(raw)), o);
  return out;
}

/** Encode an RGB image (3 bytes per pixel, row-major) as a PNG file. */
export function encodePng(width: number, height: number, rgb: Uint8Array): Uint8Array {
  if (rgb.length !== width * height * 3) {
    throw new Error(`pixel buffer has ${rgb.length} bytes, expected ${width * height * 3}`);
  }
  const ihdr = new Uint8Array(13);
  ihdr.set(u32be(width), 0);
  ihdr.set(u32be(height), 4);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 2; // color type: truecolor
  ihdr[10] = 0; // compression
  ihdr[11] = 0; // filter method
  ihdr[12] = 0; // no interlace

  // Raw scanlines, each prefixed with filter byte 0.
  const stride = width * 3;
  const raw = new Uint8Array(height * (stride + 1));
  for (let y = 0; y < height; y++) {
    raw[y * (stride + 1)] = 0;
    raw.set(rgb.subarray(y * stride, (y + 1) * stride), y * (stride + 1) + 1);
  }

  const signature = new Uint8Array([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);
  const parts = [signature, chunk("IHDR", ihdr), chunk("IDAT", zlibStored(raw)), chunk("IEND", new Uint8Array(0))];
  const total = parts.reduce((s, p) => s + p.length, 0);
  const out = new Uint8Array(total);
  let o = 0;
  for (const p of parts) {
    out.set(p, o);
    o += p.length;
  }
  return out;
}
