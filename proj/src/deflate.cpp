#include "vdepth/deflate.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <queue>

#include "vdepth/errors.hpp"

namespace vdepth::deflate {
namespace {

constexpr int kWindowSize = 32768;
constexpr int kMinMatch = 3;
constexpr int kMaxMatch = 258;
constexpr int kMaxStored = 65535;
constexpr int kLitLenSymbols = 286;
constexpr int kDistSymbols = 30;
constexpr int kEndOfBlock = 256;
constexpr int kMaxCodeBits = 15;
constexpr int kMaxCodeLengthBits = 7;

constexpr std::array<std::uint16_t, 29> kLengthBase = {
    3,  4,  5,  6,  7,  8,  9,  10, 11,  13,  15,  17,  19,  23, 27,
    31, 35, 43, 51, 59, 67, 83, 99, 115, 131, 163, 195, 227, 258};
constexpr std::array<std::uint8_t, 29> kLengthExtra = {
    0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2,
    2, 3, 3, 3, 3, 4, 4, 4, 4, 5, 5, 5, 5, 0};
constexpr std::array<std::uint16_t, 30> kDistBase = {
    1,    2,    3,    4,    5,    7,     9,     13,    17,  25,
    33,   49,   65,   97,   129,  193,   257,   385,   513, 769,
    1025, 1537, 2049, 3073, 4097, 6145,  8193,  12289, 16385, 24577};
constexpr std::array<std::uint8_t, 30> kDistExtra = {
    0, 0, 0, 0, 1, 1, 2, 2,  3,  3,  4,  4,  5,  5,  6,
    6, 7, 7, 8, 8, 9, 9, 10, 10, 11, 11, 12, 12, 13, 13};
constexpr std::array<std::uint8_t, 19> kCodeLengthOrder = {
    16, 17, 18, 0, 8, 7, 9, 6, 10, 5, 11, 4, 12, 3, 13, 2, 14, 1, 15};

std::array<std::uint8_t, 288> fixed_litlen_lengths() {
  std::array<std::uint8_t, 288> lengths{};
  for (int i = 0; i < 144; ++i) lengths[i] = 8;
  for (int i = 144; i < 256; ++i) lengths[i] = 9;
  for (int i = 256; i < 280; ++i) lengths[i] = 7;
  for (int i = 280; i < 288; ++i) lengths[i] = 8;
  return lengths;
}

std::array<std::uint8_t, 32> fixed_dist_lengths() {
  std::array<std::uint8_t, 32> lengths{};
  lengths.fill(5);
  return lengths;
}

int length_code(int length) {
  // Index into kLengthBase, not the litlen symbol.
  auto it = std::upper_bound(kLengthBase.begin(), kLengthBase.end(), length);
  return static_cast<int>(it - kLengthBase.begin()) - 1;
}

int dist_code(int dist) {
  auto it = std::upper_bound(kDistBase.begin(), kDistBase.end(), dist);
  return static_cast<int>(it - kDistBase.begin()) - 1;
}

std::uint32_t reverse_bits(std::uint32_t code, int bits) {
  std::uint32_t out = 0;
  for (int i = 0; i < bits; ++i) {
    out = (out << 1) | (code & 1u);
    code >>= 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Encoder

class BitWriter {
 public:
  void put(std::uint32_t value, int bits) {
    buffer_ |= static_cast<std::uint64_t>(value) << count_;
    count_ += bits;
    while (count_ >= 8) {
      out_.push_back(static_cast<std::uint8_t>(buffer_));
      buffer_ >>= 8;
      count_ -= 8;
    }
  }

  void align() {
    if (count_ > 0) put(0, 8 - count_);
  }

  int pending_bits() const { return count_; }

  std::vector<std::uint8_t> finish() {
    align();
    return std::move(out_);
  }

 private:
  std::vector<std::uint8_t> out_;
  std::uint64_t buffer_ = 0;
  int count_ = 0;
};

// Huffman code lengths for the given frequencies, no longer than max_bits.
// Always yields a complete code with at least two symbols so every decoder
// accepts it, even when fewer than two symbols are used.
std::vector<std::uint8_t> code_lengths(std::vector<std::uint32_t> freqs,
                                       int max_bits) {
  const int n = static_cast<int>(freqs.size());
  std::vector<std::uint8_t> lengths(n, 0);
  int used = static_cast<int>(
      std::count_if(freqs.begin(), freqs.end(), [](auto f) { return f > 0; }));
  if (used < 2) {
    for (int s = 0; s < n && used < 2; ++s) {
      if (freqs[s] == 0) {
        freqs[s] = 1;
        ++used;
      }
    }
  }

  struct Node {
    std::uint64_t weight;
    int left;
    int right;
  };
  for (;;) {
    std::vector<Node> nodes;
    nodes.reserve(2 * n);
    using Entry = std::pair<std::uint64_t, int>;  // (weight, node index)
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (int s = 0; s < n; ++s) {
      if (freqs[s] > 0) {
        nodes.push_back({freqs[s], -1, s});
        heap.emplace(freqs[s], static_cast<int>(nodes.size()) - 1);
      }
    }
    while (heap.size() > 1) {
      auto [wa, a] = heap.top();
      heap.pop();
      auto [wb, b] = heap.top();
      heap.pop();
      nodes.push_back({wa + wb, a, b});
      heap.emplace(wa + wb, static_cast<int>(nodes.size()) - 1);
    }

    std::fill(lengths.begin(), lengths.end(), 0);
    int longest = 0;
    std::vector<std::pair<int, int>> stack = {{heap.top().second, 0}};
    while (!stack.empty()) {
      auto [index, depth] = stack.back();
      stack.pop_back();
      const Node& node = nodes[index];
      if (node.left < 0) {
        lengths[node.right] = static_cast<std::uint8_t>(depth);
        longest = std::max(longest, depth);
      } else {
        stack.emplace_back(node.left, depth + 1);
        stack.emplace_back(node.right, depth + 1);
      }
    }
    if (longest <= max_bits) return lengths;
    // Flatten the distribution and retry; converges since all weights tend
    // to 1, and a balanced tree over at most 288 symbols fits in 9 bits.
    for (auto& f : freqs) {
      if (f > 0) f = std::max<std::uint32_t>(1, f >> 1);
    }
  }
}

// Canonical codes, already bit-reversed for LSB-first emission.
std::vector<std::uint32_t> canonical_codes(
    std::span<const std::uint8_t> lengths) {
  std::array<int, kMaxCodeBits + 1> count{};
  for (auto len : lengths) ++count[len];
  count[0] = 0;
  std::array<std::uint32_t, kMaxCodeBits + 2> next{};
  std::uint32_t code = 0;
  for (int bits = 1; bits <= kMaxCodeBits; ++bits) {
    code = (code + count[bits - 1]) << 1;
    next[bits] = code;
  }
  std::vector<std::uint32_t> codes(lengths.size(), 0);
  for (std::size_t s = 0; s < lengths.size(); ++s) {
    if (lengths[s] != 0) {
      codes[s] = reverse_bits(next[lengths[s]]++, lengths[s]);
    }
  }
  return codes;
}

struct Symbol {
  std::uint16_t length;  // 0 for a literal
  std::uint16_t value;   // literal byte, or match distance
};

// Run-length encoded code length sequence for a dynamic block header.
struct CodeLengthToken {
  std::uint8_t symbol;  // 0..18
  std::uint8_t extra;
};

std::vector<CodeLengthToken> rle_code_lengths(
    std::span<const std::uint8_t> lengths) {
  std::vector<CodeLengthToken> tokens;
  const std::size_t n = lengths.size();
  std::size_t i = 0;
  while (i < n) {
    const std::uint8_t len = lengths[i];
    std::size_t run = 1;
    while (i + run < n && lengths[i + run] == len) ++run;
    if (len == 0) {
      std::size_t left = run;
      while (left >= 11) {
        auto take = std::min<std::size_t>(left, 138);
        tokens.push_back({18, static_cast<std::uint8_t>(take - 11)});
        left -= take;
      }
      if (left >= 3) {
        tokens.push_back({17, static_cast<std::uint8_t>(left - 3)});
        left = 0;
      }
      for (; left > 0; --left) tokens.push_back({0, 0});
    } else {
      tokens.push_back({len, 0});
      std::size_t left = run - 1;
      while (left >= 3) {
        auto take = std::min<std::size_t>(left, 6);
        tokens.push_back({16, static_cast<std::uint8_t>(take - 3)});
        left -= take;
      }
      for (; left > 0; --left) tokens.push_back({len, 0});
    }
    i += run;
  }
  return tokens;
}

class Compressor {
 public:
  Compressor(std::span<const std::uint8_t> input, const Options& options)
      : in_(input), options_(options), head_(kHashSize, -1),
        prev_(kWindowSize, -1) {
    symbols_.reserve(static_cast<std::size_t>(options_.block_symbols));
  }

  std::vector<std::uint8_t> run() {
    const int n = static_cast<int>(in_.size());
    int pos = 0;
    while (pos < n) {
      Match m = find(pos);
      insert(pos);
      while (m.length >= kMinMatch && m.length < options_.nice_length &&
             pos + 1 < n) {
        Match next = find(pos + 1);
        if (next.length <= m.length) break;
        literal(pos);
        ++pos;
        insert(pos);
        m = next;
      }
      if (m.length >= kMinMatch) {
        match(m);
        for (int p = pos + 1; p < pos + m.length; ++p) insert(p);
        pos += m.length;
        block_end_ = pos;
      } else {
        literal(pos);
        ++pos;
      }
      if (static_cast<int>(symbols_.size()) >= options_.block_symbols) {
        flush(false);
      }
    }
    flush(true);
    return writer_.finish();
  }

 private:
  static constexpr int kHashBits = 15;
  static constexpr int kHashSize = 1 << kHashBits;

  struct Match {
    int length = 0;
    int distance = 0;
  };

  std::uint32_t hash(int pos) const {
    const std::uint32_t v = in_[pos] | (in_[pos + 1] << 8) | (in_[pos + 2] << 16);
    return (v * 2654435761u) >> (32 - kHashBits);
  }

  void insert(int pos) {
    if (pos + kMinMatch > static_cast<int>(in_.size())) return;
    const auto h = hash(pos);
    prev_[pos & (kWindowSize - 1)] = head_[h];
    head_[h] = pos;
  }

  Match find(int pos) const {
    Match best;
    const int n = static_cast<int>(in_.size());
    if (pos + kMinMatch > n) return best;
    const int limit = std::min(kMaxMatch, n - pos);
    int candidate = head_[hash(pos)];
    int chain = options_.max_chain;
    const std::uint8_t* cur = in_.data() + pos;
    while (candidate >= 0 && chain-- > 0) {
      const int dist = pos - candidate;
      if (dist <= 0 || dist > kWindowSize) break;
      const std::uint8_t* ref = in_.data() + candidate;
      if (ref[best.length] == cur[best.length] || best.length == 0) {
        int len = 0;
        while (len < limit && ref[len] == cur[len]) ++len;
        if (len > best.length) {
          best = {len, dist};
          if (len >= options_.nice_length || len == limit) break;
        }
      }
      const int next = prev_[candidate & (kWindowSize - 1)];
      if (next >= candidate) break;
      candidate = next;
    }
    if (best.length < kMinMatch) best = {};
    return best;
  }

  void literal(int pos) {
    symbols_.push_back({0, in_[pos]});
    block_end_ = pos + 1;
  }

  void match(const Match& m) {
    symbols_.push_back({static_cast<std::uint16_t>(m.length),
                        static_cast<std::uint16_t>(m.distance)});
  }

  void flush(bool final_block) {
    std::vector<std::uint32_t> lit_freq(kLitLenSymbols, 0);
    std::vector<std::uint32_t> dist_freq(kDistSymbols, 0);
    for (const auto& s : symbols_) {
      if (s.length == 0) {
        ++lit_freq[s.value];
      } else {
        ++lit_freq[257 + length_code(s.length)];
        ++dist_freq[dist_code(s.value)];
      }
    }
    lit_freq[kEndOfBlock] = 1;

    auto lit_lengths = code_lengths(lit_freq, kMaxCodeBits);
    auto dist_lengths = code_lengths(dist_freq, kMaxCodeBits);

    int hlit = kLitLenSymbols;
    while (hlit > 257 && lit_lengths[hlit - 1] == 0) --hlit;
    int hdist = kDistSymbols;
    while (hdist > 1 && dist_lengths[hdist - 1] == 0) --hdist;

    std::vector<std::uint8_t> all_lengths(lit_lengths.begin(),
                                          lit_lengths.begin() + hlit);
    all_lengths.insert(all_lengths.end(), dist_lengths.begin(),
                       dist_lengths.begin() + hdist);
    auto tokens = rle_code_lengths(all_lengths);
    std::vector<std::uint32_t> clen_freq(19, 0);
    for (const auto& t : tokens) ++clen_freq[t.symbol];
    auto clen_lengths = code_lengths(clen_freq, kMaxCodeLengthBits);
    int hclen = 19;
    while (hclen > 4 && clen_lengths[kCodeLengthOrder[hclen - 1]] == 0) --hclen;

    auto payload_bits = [&](std::span<const std::uint8_t> ll,
                            std::span<const std::uint8_t> dl) {
      std::uint64_t bits = ll[kEndOfBlock];
      for (int s = 0; s < kLitLenSymbols; ++s) {
        if (s == kEndOfBlock) continue;
        bits += static_cast<std::uint64_t>(lit_freq[s]) * ll[s];
        if (s > kEndOfBlock) bits += lit_freq[s] * kLengthExtra[s - 257];
      }
      for (int d = 0; d < kDistSymbols; ++d) {
        bits += static_cast<std::uint64_t>(dist_freq[d]) * (dl[d] + kDistExtra[d]);
      }
      return bits;
    };

    std::uint64_t dynamic_bits = 3 + 14 + 3ull * hclen;
    for (const auto& t : tokens) {
      dynamic_bits += clen_lengths[t.symbol];
      dynamic_bits += t.symbol == 16 ? 2 : t.symbol == 17 ? 3 : t.symbol == 18 ? 7 : 0;
    }
    dynamic_bits += payload_bits(lit_lengths, dist_lengths);

    static const auto fixed_ll = fixed_litlen_lengths();
    static const auto fixed_dl = fixed_dist_lengths();
    const std::uint64_t fixed_bits = 3 + payload_bits(fixed_ll, fixed_dl);

    const std::size_t raw_len = static_cast<std::size_t>(block_end_ - block_start_);
    const std::size_t chunks = std::max<std::size_t>(1, (raw_len + kMaxStored - 1) / kMaxStored);
    const std::uint64_t stored_bits =
        chunks * (3 + 7 + 32) + 8ull * raw_len;

    if (stored_bits < fixed_bits && stored_bits < dynamic_bits) {
      write_stored(final_block, raw_len);
    } else if (fixed_bits <= dynamic_bits) {
      writer_.put(final_block ? 1 : 0, 1);
      writer_.put(1, 2);
      write_symbols(fixed_ll, fixed_dl);
    } else {
      writer_.put(final_block ? 1 : 0, 1);
      writer_.put(2, 2);
      writer_.put(static_cast<std::uint32_t>(hlit - 257), 5);
      writer_.put(static_cast<std::uint32_t>(hdist - 1), 5);
      writer_.put(static_cast<std::uint32_t>(hclen - 4), 4);
      for (int i = 0; i < hclen; ++i) writer_.put(clen_lengths[kCodeLengthOrder[i]], 3);
      const auto clen_codes = canonical_codes(clen_lengths);
      for (const auto& t : tokens) {
        writer_.put(clen_codes[t.symbol], clen_lengths[t.symbol]);
        if (t.symbol == 16) writer_.put(t.extra, 2);
        if (t.symbol == 17) writer_.put(t.extra, 3);
        if (t.symbol == 18) writer_.put(t.extra, 7);
      }
      write_symbols(lit_lengths, dist_lengths);
    }
    symbols_.clear();
    block_start_ = block_end_;
  }

  void write_stored(bool final_block, std::size_t raw_len) {
    std::size_t offset = static_cast<std::size_t>(block_start_);
    std::size_t left = raw_len;
    do {
      const std::size_t take = std::min<std::size_t>(left, kMaxStored);
      const bool last = final_block && take == left;
      writer_.put(last ? 1 : 0, 1);
      writer_.put(0, 2);
      writer_.align();
      writer_.put(static_cast<std::uint32_t>(take), 16);
      writer_.put(static_cast<std::uint32_t>(~take & 0xffff), 16);
      for (std::size_t i = 0; i < take; ++i) writer_.put(in_[offset + i], 8);
      offset += take;
      left -= take;
    } while (left > 0);
  }

  void write_symbols(std::span<const std::uint8_t> ll,
                     std::span<const std::uint8_t> dl) {
    const auto lit_codes = canonical_codes(ll);
    const auto dist_codes = canonical_codes(dl);
    for (const auto& s : symbols_) {
      if (s.length == 0) {
        writer_.put(lit_codes[s.value], ll[s.value]);
        continue;
      }
      const int lc = length_code(s.length);
      writer_.put(lit_codes[257 + lc], ll[257 + lc]);
      if (kLengthExtra[lc] > 0) {
        writer_.put(s.length - kLengthBase[lc], kLengthExtra[lc]);
      }
      const int dc = dist_code(s.value);
      writer_.put(dist_codes[dc], dl[dc]);
      if (kDistExtra[dc] > 0) {
        writer_.put(s.value - kDistBase[dc], kDistExtra[dc]);
      }
    }
    writer_.put(lit_codes[kEndOfBlock], ll[kEndOfBlock]);
  }

  std::span<const std::uint8_t> in_;
  Options options_;
  std::vector<int> head_;
  std::vector<int> prev_;
  std::vector<Symbol> symbols_;
  int block_start_ = 0;
  int block_end_ = 0;
  BitWriter writer_;
};

// ---------------------------------------------------------------------------
// Decoder

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> in) : in_(in) {}

  // Bits available without reading past the end of input.
  int fill(int want) {
    while (count_ < want && pos_ < in_.size()) {
      buffer_ |= static_cast<std::uint64_t>(in_[pos_++]) << count_;
      count_ += 8;
    }
    return count_;
  }

  std::uint32_t peek(int bits) {
    fill(bits);
    return static_cast<std::uint32_t>(buffer_ & ((1ull << bits) - 1));
  }

  void consume(int bits) {
    if (bits > count_) throw FormatError("deflate: unexpected end of stream");
    buffer_ >>= bits;
    count_ -= bits;
  }

  std::uint32_t get(int bits) {
    if (bits == 0) return 0;
    if (fill(bits) < bits) throw FormatError("deflate: unexpected end of stream");
    auto v = peek(bits);
    consume(bits);
    return v;
  }

  void align() { consume(count_ % 8); }

  // Whole bytes of input not yet consumed, counting buffered ones.
  std::size_t remaining_bytes() const {
    return (in_.size() - pos_) + static_cast<std::size_t>(count_ / 8);
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  std::uint64_t buffer_ = 0;
  int count_ = 0;
};

class HuffmanTable {
 public:
  HuffmanTable(std::span<const std::uint8_t> lengths) {
    std::array<int, kMaxCodeBits + 1> count{};
    for (auto len : lengths) {
      if (len > kMaxCodeBits) throw FormatError("deflate: code length too long");
      ++count[len];
    }
    count[0] = 0;
    int left = 1;
    for (int bits = 1; bits <= kMaxCodeBits; ++bits) {
      left <<= 1;
      left -= count[bits];
      if (left < 0) throw FormatError("deflate: over-subscribed code");
      if (count[bits] > 0) bits_ = bits;
    }
    if (bits_ == 0) return;
    entries_.assign(std::size_t{1} << bits_, Entry{});
    const auto codes = canonical_codes(lengths);
    for (std::size_t s = 0; s < lengths.size(); ++s) {
      const int len = lengths[s];
      if (len == 0) continue;
      for (std::uint32_t fill = codes[s]; fill < entries_.size(); fill += 1u << len) {
        entries_[fill] = {static_cast<std::uint16_t>(s), static_cast<std::uint8_t>(len)};
      }
    }
  }

  int decode(BitReader& reader) const {
    if (bits_ == 0) throw FormatError("deflate: empty code used");
    const int have = reader.fill(bits_);
    const Entry& e = entries_[reader.peek(bits_)];
    if (e.length == 0) throw FormatError("deflate: invalid code");
    if (e.length > have) throw FormatError("deflate: unexpected end of stream");
    reader.consume(e.length);
    return e.symbol;
  }

 private:
  struct Entry {
    std::uint16_t symbol = 0;
    std::uint8_t length = 0;
  };
  std::vector<Entry> entries_;
  int bits_ = 0;
};

class Decompressor {
 public:
  Decompressor(std::span<const std::uint8_t> in, std::size_t max_output)
      : reader_(in), max_output_(max_output) {}

  std::vector<std::uint8_t> run() {
    bool final_block = false;
    while (!final_block) {
      final_block = reader_.get(1) == 1;
      switch (reader_.get(2)) {
        case 0:
          stored();
          break;
        case 1: {
          static const auto ll = fixed_litlen_lengths();
          static const auto dl = fixed_dist_lengths();
          static const HuffmanTable lit(ll);
          static const HuffmanTable dist(dl);
          codes(lit, dist);
          break;
        }
        case 2:
          dynamic();
          break;
        default:
          throw FormatError("deflate: invalid block type");
      }
    }
    if (reader_.remaining_bytes() != 0) {
      throw FormatError("deflate: trailing data after final block");
    }
    return std::move(out_);
  }

 private:
  void reserve(std::size_t extra) {
    if (out_.size() + extra > max_output_) {
      throw FormatError("deflate: output exceeds limit");
    }
  }

  void stored() {
    reader_.align();
    const auto len = reader_.get(16);
    const auto nlen = reader_.get(16);
    if ((len ^ 0xffffu) != nlen) throw FormatError("deflate: stored length mismatch");
    reserve(len);
    for (std::uint32_t i = 0; i < len; ++i) {
      out_.push_back(static_cast<std::uint8_t>(reader_.get(8)));
    }
  }

  void dynamic() {
    const int hlit = static_cast<int>(reader_.get(5)) + 257;
    const int hdist = static_cast<int>(reader_.get(5)) + 1;
    const int hclen = static_cast<int>(reader_.get(4)) + 4;
    if (hlit > kLitLenSymbols || hdist > kDistSymbols) {
      throw FormatError("deflate: too many length or distance codes");
    }
    std::array<std::uint8_t, 19> clen{};
    for (int i = 0; i < hclen; ++i) {
      clen[kCodeLengthOrder[i]] = static_cast<std::uint8_t>(reader_.get(3));
    }
    const HuffmanTable clen_table(clen);

    std::vector<std::uint8_t> lengths;
    lengths.reserve(static_cast<std::size_t>(hlit + hdist));
    while (static_cast<int>(lengths.size()) < hlit + hdist) {
      const int sym = clen_table.decode(reader_);
      if (sym < 16) {
        lengths.push_back(static_cast<std::uint8_t>(sym));
        continue;
      }
      std::uint8_t value = 0;
      int repeat = 0;
      if (sym == 16) {
        if (lengths.empty()) throw FormatError("deflate: repeat with no previous length");
        value = lengths.back();
        repeat = 3 + static_cast<int>(reader_.get(2));
      } else if (sym == 17) {
        repeat = 3 + static_cast<int>(reader_.get(3));
      } else {
        repeat = 11 + static_cast<int>(reader_.get(7));
      }
      if (static_cast<int>(lengths.size()) + repeat > hlit + hdist) {
        throw FormatError("deflate: code lengths overflow");
      }
      lengths.insert(lengths.end(), static_cast<std::size_t>(repeat), value);
    }
    if (lengths[kEndOfBlock] == 0) throw FormatError("deflate: missing end-of-block code");

    const std::span<const std::uint8_t> all(lengths);
    const HuffmanTable lit(all.first(static_cast<std::size_t>(hlit)));
    const HuffmanTable dist(all.subspan(static_cast<std::size_t>(hlit)));
    codes(lit, dist);
  }

  void codes(const HuffmanTable& lit, const HuffmanTable& dist) {
    for (;;) {
      const int sym = lit.decode(reader_);
      if (sym < 256) {
        reserve(1);
        out_.push_back(static_cast<std::uint8_t>(sym));
        continue;
      }
      if (sym == kEndOfBlock) return;
      const int lc = sym - 257;
      if (lc >= static_cast<int>(kLengthBase.size())) {
        throw FormatError("deflate: invalid length symbol");
      }
      const int length = kLengthBase[lc] + static_cast<int>(reader_.get(kLengthExtra[lc]));
      const int dc = dist.decode(reader_);
      if (dc >= kDistSymbols) throw FormatError("deflate: invalid distance symbol");
      const std::size_t distance = kDistBase[dc] + reader_.get(kDistExtra[dc]);
      if (distance > out_.size()) throw FormatError("deflate: distance too far back");
      reserve(static_cast<std::size_t>(length));
      std::size_t from = out_.size() - distance;
      for (int i = 0; i < length; ++i) out_.push_back(out_[from + i]);
    }
  }

  BitReader reader_;
  std::size_t max_output_;
  std::vector<std::uint8_t> out_;
};

}  // namespace

std::vector<std::uint8_t> compress(std::span<const std::uint8_t> input,
                                   const Options& options) {
  if (options.max_chain < 1 || options.nice_length < kMinMatch ||
      options.block_symbols < 1) {
    throw ParameterError("deflate: invalid options");
  }
  return Compressor(input, options).run();
}

std::vector<std::uint8_t> decompress(std::span<const std::uint8_t> input) {
  return decompress(input, std::numeric_limits<std::size_t>::max());
}

std::vector<std::uint8_t> decompress(std::span<const std::uint8_t> input,
                                     std::size_t max_output) {
  return Decompressor(input, max_output).run();
}

}  // namespace vdepth::deflate
