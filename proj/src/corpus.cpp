#include "rankselect/corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace rankselect {

BitVector random_bitvector(uint64_t n_bits, double density, uint64_t seed) {
    if (!(density >= 0.0 && density <= 1.0)) throw std::invalid_argument("density must lie in [0, 1]");
    SplitMix64 rng(seed);
    const bool all = density >= 1.0;
    const auto threshold = static_cast<uint64_t>(std::ldexp(static_cast<long double>(density), 64));
    std::vector<uint64_t> words((n_bits + 63) / 64, 0);
    for (uint64_t i = 0; i < n_bits; ++i) {
        const bool bit = all || rng.next() < threshold;
        words[i >> 6] |= uint64_t{bit} << (i & 63);
    }
    return BitVector::from_words(std::move(words), n_bits);
}

std::string Code::to_string() const {
    std::string s;
    for (unsigned d = 0; d < length; ++d) s.push_back(at(d) ? '1' : '0');
    return s;
}

std::map<uint8_t, Code> huffman_codes(const std::map<uint8_t, uint64_t>& freqs) {
    std::vector<uint8_t> symbols;
    for (const auto& [sym, count] : freqs) {
        if (count > 0) symbols.push_back(sym);
    }
    if (symbols.empty()) throw std::invalid_argument("huffman_codes needs at least one symbol with a positive count");

    std::map<uint8_t, Code> codes;
    if (symbols.size() == 1) {
        codes[symbols[0]] = Code{0, 1};
        return codes;
    }

    // Nodes 0..sigma-1 are leaves in symbol order; ties in weight go to the lower id.
    struct Entry {
        uint64_t weight;
        size_t id;
        bool operator>(const Entry& o) const { return weight != o.weight ? weight > o.weight : id > o.id; }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    std::vector<size_t> parent(2 * symbols.size() - 1, 0);
    for (size_t i = 0; i < symbols.size(); ++i) heap.push({freqs.at(symbols[i]), i});
    size_t next_id = symbols.size();
    while (heap.size() > 1) {
        const Entry a = heap.top();
        heap.pop();
        const Entry b = heap.top();
        heap.pop();
        parent[a.id] = parent[b.id] = next_id;
        heap.push({a.weight + b.weight, next_id++});
    }
    const size_t root = next_id - 1;

    std::vector<std::pair<unsigned, uint8_t>> by_length;  // (length, symbol)
    for (size_t i = 0; i < symbols.size(); ++i) {
        unsigned len = 0;
        for (size_t n = i; n != root; n = parent[n]) ++len;
        if (len > 64) throw std::length_error("huffman code longer than 64 bits");
        by_length.emplace_back(len, symbols[i]);
    }
    std::sort(by_length.begin(), by_length.end());
    uint64_t code = 0;
    unsigned prev = by_length.front().first;
    for (size_t i = 0; i < by_length.size(); ++i) {
        const auto [len, sym] = by_length[i];
        if (i > 0) code = (code + 1) << (len - prev);
        prev = len;
        codes[sym] = Code{code, static_cast<uint8_t>(len)};
    }
    return codes;
}

std::string_view to_string(WtShape s) { return s == WtShape::balanced ? "balanced" : "huffman"; }

WtShape parse_wt_shape(std::string_view name) {
    if (name == "balanced") return WtShape::balanced;
    if (name == "huffman") return WtShape::huffman;
    throw std::invalid_argument("unknown wavelet tree shape '" + std::string(name) + "'");
}

WtPlan WtPlan::make(std::span<const uint8_t> text, WtShape shape) {
    if (text.empty()) throw std::invalid_argument("wavelet tree text must not be empty");
    std::array<uint64_t, 256> counts{};
    for (uint8_t c : text) ++counts[c];
    WtPlan plan;
    plan.shape = shape;
    std::map<uint8_t, uint64_t> freqs;
    for (unsigned c = 0; c < 256; ++c) {
        if (counts[c] == 0) continue;
        plan.alphabet.push_back(static_cast<uint8_t>(c));
        freqs[static_cast<uint8_t>(c)] = counts[c];
    }
    if (shape == WtShape::huffman) {
        plan.codes = huffman_codes(freqs);
        return plan;
    }
    unsigned width = 1;
    while ((size_t{1} << width) < plan.alphabet.size()) ++width;
    for (size_t r = 0; r < plan.alphabet.size(); ++r) {
        plan.codes[plan.alphabet[r]] = Code{r, static_cast<uint8_t>(width)};
    }
    return plan;
}

unsigned WtPlan::depth() const {
    unsigned d = 0;
    for (const auto& [sym, code] : codes) d = std::max<unsigned>(d, code.length);
    return d;
}

BitVector wt_concat_bits(std::span<const uint8_t> text, WtShape shape) {
    return wt_concat_bits(text, WtPlan::make(text, shape));
}

BitVector wt_concat_bits(std::span<const uint8_t> text, const WtPlan& plan) {
    if (text.empty()) throw std::invalid_argument("wavelet tree text must not be empty");
    std::array<Code, 256> table{};
    for (const auto& [sym, code] : plan.codes) table[sym] = code;

    BitVectorBuilder out;
    // Symbols reaching depth d, ordered by (node, text position).
    std::vector<uint8_t> level(text.begin(), text.end());
    for (uint8_t c : level) {
        if (table[c].length == 0) throw std::invalid_argument("text symbol missing from the wavelet tree plan");
    }
    std::vector<uint8_t> next;
    std::vector<uint8_t> right;
    for (unsigned d = 0; !level.empty(); ++d) {
        for (uint8_t c : level) out.push_back(table[c].at(d));
        next.clear();
        for (size_t a = 0; a < level.size();) {
            const uint64_t node = table[level[a]].prefix(d);
            right.clear();
            size_t b = a;
            for (; b < level.size() && table[level[b]].prefix(d) == node; ++b) {
                const Code& code = table[level[b]];
                if (code.length <= d + 1) continue;
                (code.at(d) ? right : next).push_back(level[b]);
            }
            next.insert(next.end(), right.begin(), right.end());
            a = b;
        }
        level.swap(next);
    }
    return std::move(out).finalize();
}

std::vector<uint8_t> wt_decode_text(const BitVector& bits, const WtPlan& plan, uint64_t text_length) {
    std::map<std::pair<unsigned, uint64_t>, uint8_t> leaf;
    for (const auto& [sym, code] : plan.codes) leaf[{code.length, code.bits}] = sym;
    const unsigned max_depth = plan.depth();

    std::vector<uint8_t> text(text_length, 0);
    std::vector<uint64_t> path(text_length, 0);
    std::vector<uint64_t> level(text_length);
    std::iota(level.begin(), level.end(), uint64_t{0});
    std::vector<uint64_t> next;
    std::vector<uint64_t> right;
    uint64_t cursor = 0;
    for (unsigned d = 0; !level.empty(); ++d) {
        if (d >= max_depth) throw std::runtime_error("wavelet tree bits do not match the plan");
        if (level.size() > bits.size() - cursor) throw std::runtime_error("wavelet tree bits exhausted");
        for (uint64_t pos : level) path[pos] = (path[pos] << 1) | bits[cursor++];
        next.clear();
        for (size_t a = 0; a < level.size();) {
            const uint64_t node = path[level[a]] >> 1;
            right.clear();
            size_t b = a;
            for (; b < level.size() && (path[level[b]] >> 1) == node; ++b) {
                const uint64_t pos = level[b];
                const auto hit = leaf.find({d + 1, path[pos]});
                if (hit != leaf.end()) {
                    text[pos] = hit->second;
                    continue;
                }
                ((path[pos] & 1) ? right : next).push_back(pos);
            }
            next.insert(next.end(), right.begin(), right.end());
            a = b;
        }
        level.swap(next);
    }
    if (cursor != bits.size()) throw std::runtime_error("trailing wavelet tree bits");
    return text;
}

std::string_view to_string(TextKind k) {
    switch (k) {
        case TextKind::dna: return "dna";
        case TextKind::english: return "english";
        case TextKind::proteins: return "proteins";
        case TextKind::xml: return "xml";
    }
    return "unknown";
}

TextKind parse_text_kind(std::string_view name) {
    for (TextKind k : {TextKind::dna, TextKind::english, TextKind::proteins, TextKind::xml}) {
        if (to_string(k) == name) return k;
    }
    throw std::invalid_argument("unknown text kind '" + std::string(name) + "'");
}

namespace {

// Sampling from a fixed discrete distribution by cumulative weights.
class Discrete {
public:
    explicit Discrete(std::span<const double> weights) {
        double acc = 0;
        for (double w : weights) cumulative_.push_back(acc += w);
    }
    size_t draw(SplitMix64& rng) const {
        const double u = static_cast<double>(rng.next() >> 11) * 0x1.0p-53 * cumulative_.back();
        return static_cast<size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin());
    }

private:
    std::vector<double> cumulative_;
};

constexpr std::string_view kLetters = "etaoinshrdlcumwfgypbvkjxqz";
constexpr double kLetterFreq[] = {12.7, 9.1, 8.2, 7.5, 7.0, 6.7, 6.3, 6.1, 6.0, 4.3, 4.0, 2.8, 2.8,
                                  2.4,  2.4, 2.2, 2.0, 2.0, 1.9, 1.5, 1.0, 0.8, 0.2, 0.2, 0.1, 0.1};

class WordSource {
public:
    WordSource(SplitMix64& rng, size_t vocabulary) : letters_(kLetterFreq) {
        std::vector<double> zipf;
        for (size_t r = 0; r < vocabulary; ++r) {
            const size_t len = 1 + std::min<size_t>(rng.below(4) + rng.below(4) + rng.below(3), 11);
            std::string w;
            for (size_t i = 0; i < len; ++i) w.push_back(kLetters[letters_.draw(rng)]);
            words_.push_back(std::move(w));
            zipf.push_back(1.0 / static_cast<double>(r + 1));
        }
        // shorter words are the frequent ones
        std::stable_sort(words_.begin(), words_.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
        rank_ = Discrete(zipf);
    }
    const std::string& draw(SplitMix64& rng) const { return words_[rank_.draw(rng)]; }

private:
    Discrete letters_;
    Discrete rank_{std::span<const double>{}};
    std::vector<std::string> words_;
};

void english_sentence(std::vector<uint8_t>& out, const WordSource& words, SplitMix64& rng) {
    const size_t n = 4 + rng.below(18);
    for (size_t i = 0; i < n; ++i) {
        std::string w = words.draw(rng);
        if (i == 0) w[0] = static_cast<char>(w[0] - 'a' + 'A');
        out.insert(out.end(), w.begin(), w.end());
        if (i + 1 < n) {
            if (rng.below(12) == 0) out.push_back(',');
            out.push_back(' ');
        }
    }
    out.push_back(rng.below(8) == 0 ? '?' : '.');
    out.push_back(rng.below(6) == 0 ? '\n' : ' ');
}

}  // namespace

std::vector<uint8_t> synthetic_text(TextKind kind, uint64_t length, uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<uint8_t> out;
    out.reserve(length + 512);
    switch (kind) {
        case TextKind::dna: {
            constexpr double w[] = {0.29, 0.21, 0.21, 0.29};
            const Discrete base(w);
            while (out.size() < length) {
                const uint64_t roll = rng.below(10000);
                if (roll < 20 && out.size() > 2000) {
                    // approximate repeat of an earlier segment
                    const uint64_t len = 100 + rng.below(900);
                    const uint64_t from = rng.below(out.size() - len);
                    for (uint64_t i = 0; i < len; ++i) {
                        out.push_back(rng.below(100) == 0 ? "ACGT"[rng.below(4)] : out[from + i]);
                    }
                } else if (roll < 21) {
                    out.insert(out.end(), 50 + rng.below(500), 'N');
                } else {
                    out.push_back("ACGT"[base.draw(rng)]);
                }
            }
            break;
        }
        case TextKind::proteins: {
            constexpr std::string_view aa = "ARNDCQEGHILKMFPSTWYV";
            constexpr double w[] = {8.25, 5.53, 4.06, 5.45, 1.37, 3.93, 6.75, 7.07, 2.27, 5.96,
                                    9.66, 5.84, 2.42, 3.86, 4.70, 6.56, 5.34, 1.08, 2.92, 6.87};
            const Discrete residue(w);
            while (out.size() < length) {
                const uint64_t len = 80 + rng.below(420);
                for (uint64_t i = 0; i < len; ++i) out.push_back(aa[residue.draw(rng)]);
                out.push_back('\n');
            }
            break;
        }
        case TextKind::english: {
            const WordSource words(rng, 8000);
            while (out.size() < length) english_sentence(out, words, rng);
            break;
        }
        case TextKind::xml: {
            const WordSource words(rng, 3000);
            constexpr std::string_view tags[] = {"author", "title", "journal", "booktitle", "pages", "ee"};
            const auto put = [&out](std::string_view s) { out.insert(out.end(), s.begin(), s.end()); };
            while (out.size() < length) {
                put("<article key=\"journals/");
                put(words.draw(rng));
                put("/");
                put(std::to_string(rng.below(100000)));
                put("\" mdate=\"20");
                put(std::to_string(10 + rng.below(10)));
                put("-0");
                put(std::to_string(1 + rng.below(9)));
                put("-1");
                put(std::to_string(rng.below(10)));
                put("\">\n");
                const uint64_t fields = 2 + rng.below(5);
                for (uint64_t f = 0; f < fields; ++f) {
                    const std::string_view tag = tags[rng.below(std::size(tags))];
                    put("<");
                    put(tag);
                    put(">");
                    const uint64_t n = 1 + rng.below(6);
                    for (uint64_t i = 0; i < n; ++i) {
                        if (i) put(" ");
                        put(words.draw(rng));
                    }
                    put("</");
                    put(tag);
                    put(">\n");
                }
                put("<year>");
                put(std::to_string(1970 + rng.below(50)));
                put("</year>\n</article>\n");
            }
            break;
        }
    }
    out.resize(length);
    return out;
}

}  // namespace rankselect
