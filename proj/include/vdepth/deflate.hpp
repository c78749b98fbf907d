#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace vdepth::deflate {

// Raw DEFLATE (RFC 1951) without zlib or gzip wrappers.
//
// The compressor uses hash-chained LZ77 with one-step lazy matching and picks,
// per block, the smallest of stored, fixed-Huffman and dynamic-Huffman
// encodings. Output is deterministic for a given input and options.

struct Options {
  // Longest hash chain walked per position. Larger is slower and smaller.
  int max_chain = 64;
  // Stop searching once a match at least this long is found.
  int nice_length = 128;
  // Symbols buffered before a block is flushed.
  int block_symbols = 1 << 16;
};

std::vector<std::uint8_t> compress(std::span<const std::uint8_t> input,
                                   const Options& options = {});

// Throws FormatError on any malformed or truncated stream. Trailing bytes
// after the final block are rejected too.
std::vector<std::uint8_t> decompress(std::span<const std::uint8_t> input);

// Same as decompress() but fails once the output would exceed max_output,
// so untrusted packets cannot inflate without bound.
std::vector<std::uint8_t> decompress(std::span<const std::uint8_t> input,
                                     std::size_t max_output);

}  // namespace vdepth::deflate
