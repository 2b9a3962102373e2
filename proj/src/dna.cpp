#include "medchain/dna.hpp"

#include <gmpxx.h>
#include <mpfr.h>

#include "medchain/errors.hpp"

namespace medchain::dna {

namespace {

constexpr char kBaseForPair[4] = {'A', 'C', 'G', 'T'};

int pair_for_base(char base) {
    switch (base) {
        case 'A': return 0;
        case 'C': return 1;
        case 'G': return 2;
        case 'T': return 3;
        default: return -1;
    }
}

// Writes b as m^t with m minimal (m not itself a perfect power).
void minimal_base(std::uint64_t b, std::uint64_t& m, unsigned& t) {
    m = b;
    t = 1;
    for (unsigned k = 63; k >= 2; --k) {
        mpz_class root, value(static_cast<unsigned long>(b));
        if (mpz_root(root.get_mpz_t(), value.get_mpz_t(), k) != 0) {
            m = root.get_ui();
            t = k;
            return;
        }
    }
}

// If x == m^s for some s >= 1, returns s; otherwise 0.
std::uint64_t power_index(std::uint64_t x, std::uint64_t m) {
    if (m < 2) return 0;
    std::uint64_t value = 1, s = 0;
    while (value < x) {
        if (value > x / m) return 0;
        value *= m;
        ++s;
    }
    return value == x ? s : 0;
}

// Exact floor(N * log_b(x)) via the equivalence b^k <= x^N < b^(k+1),
// evaluated with integer arithmetic only. Used when the floating-point
// value sits too close to an integer to trust.
std::uint64_t exact_floor_scaled_log(std::uint64_t b, std::uint64_t x) {
    mpz_class t;
    mpz_ui_pow_ui(t.get_mpz_t(), static_cast<unsigned long>(x),
                  static_cast<unsigned long>(DnaParams::kScale));
    std::size_t digits = mpz_sizeinbase(t.get_mpz_t(), static_cast<int>(b));
    // sizeinbase is exact or one too large; settle with one comparison.
    mpz_class probe;
    mpz_ui_pow_ui(probe.get_mpz_t(), static_cast<unsigned long>(b),
                  static_cast<unsigned long>(digits - 1));
    return probe <= t ? digits - 1 : digits - 2;
}

}  // namespace

std::string bits_to_dna(const BitString& bits) {
    if (bits.size() % 2 != 0)
        throw Error(ErrorKind::Domain, "dna: bit count must be even");
    std::string out;
    out.reserve(bits.size() / 2);
    for (std::size_t i = 0; i < bits.size(); i += 2) {
        if (bits[i] > 1 || bits[i + 1] > 1)
            throw Error(ErrorKind::Domain, "dna: bit values must be 0 or 1");
        out.push_back(kBaseForPair[(bits[i] << 1) | bits[i + 1]]);
    }
    return out;
}

BitString dna_to_bits(const std::string& seq) {
    BitString out;
    out.reserve(seq.size() * 2);
    for (char base : seq) {
        int pair = pair_for_base(base);
        if (pair < 0)
            throw Error(ErrorKind::Corruption,
                        std::string("dna: invalid base '") + base + "'");
        out.push_back(static_cast<std::uint8_t>(pair >> 1));
        out.push_back(static_cast<std::uint8_t>(pair & 1));
    }
    return out;
}

std::uint32_t dummy_count(const DnaParams& params, std::uint64_t x) {
    if (params.b < 2)
        throw Error(ErrorKind::Parameter, "dna: base b must be >= 2");
    if (x < 2)
        throw Error(ErrorKind::Domain, "dna: schedule integer x must be >= 2");

    // R*N is an integer exactly when log_b(x) is rational, i.e. when b and x
    // are powers of a common integer. Resolve those cases exactly.
    std::uint64_t m = 0;
    unsigned t = 1;
    minimal_base(params.b, m, t);
    if (std::uint64_t s = power_index(x, m)) {
        std::uint64_t scaled = s * DnaParams::kScale / t;  // floor(sN/t)
        return static_cast<std::uint32_t>(scaled % DnaParams::kModulus);
    }

    // Here log_b(x) is irrational: evaluate at 256 bits (~77 decimal digits).
    mpfr_t log_x, log_b, value;
    mpfr_inits2(256, log_x, log_b, value, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_ui(log_x, static_cast<unsigned long>(x), MPFR_RNDN);
    mpfr_log(log_x, log_x, MPFR_RNDN);
    mpfr_set_ui(log_b, static_cast<unsigned long>(params.b), MPFR_RNDN);
    mpfr_log(log_b, log_b, MPFR_RNDN);
    mpfr_div(value, log_x, log_b, MPFR_RNDN);
    mpfr_mul_ui(value, value, static_cast<unsigned long>(DnaParams::kScale),
                MPFR_RNDN);

    mpfr_t floor_value, gap;
    mpfr_inits2(256, floor_value, gap, static_cast<mpfr_ptr>(nullptr));
    mpfr_floor(floor_value, value);
    mpfr_sub(gap, value, floor_value, MPFR_RNDN);
    std::uint64_t floored = mpfr_get_uj(floor_value, MPFR_RNDZ);

    // Distance from the nearest integer below 2^-80 would mean ~56 bits of
    // genuine margin have evaporated; fall back to the exact route.
    bool near_boundary = mpfr_cmp_d(gap, 0x1p-80) < 0 ||
                         mpfr_cmp_d(gap, 1.0 - 0x1p-80) > 0;
    mpfr_clears(log_x, log_b, value, floor_value, gap,
                static_cast<mpfr_ptr>(nullptr));
    if (near_boundary) floored = exact_floor_scaled_log(params.b, x);

    return static_cast<std::uint32_t>(floored % DnaParams::kModulus);
}

DummySide pick_side(std::uint32_t s) {
    return s % 2 == 0 ? DummySide::First : DummySide::Second;
}

std::string interleave(const std::vector<std::string>& chunks,
                       const DnaParams& params) {
    if (chunks.empty())
        throw Error(ErrorKind::Domain, "dna: no chunks to interleave");
    std::size_t len = chunks.front().size();
    for (const auto& chunk : chunks) {
        if (chunk.size() != len)
            throw Error(ErrorKind::Domain, "dna: chunk lengths differ");
    }
    if (len < DnaParams::kModulus)
        throw Error(ErrorKind::Config,
                    "dna: chunk length must be >= 100 so a dummy prefix exists");

    std::string out;
    out.reserve(chunks.size() * len + chunks.size() * DnaParams::kModulus);
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        out += chunks[i];
        if (i + 1 == chunks.size()) break;
        std::uint32_t s = dummy_count(params, params.x0 + i);
        const std::string& donor =
            pick_side(s) == DummySide::First ? chunks[i] : chunks[i + 1];
        out.append(donor, 0, s);
    }
    return out;
}

std::vector<std::string> deinterleave(const std::string& seq,
                                      std::size_t chunk_len,
                                      std::size_t n_chunks,
                                      const DnaParams& params) {
    if (n_chunks == 0)
        throw Error(ErrorKind::Domain, "dna: n_chunks must be >= 1");
    if (chunk_len < DnaParams::kModulus)
        throw Error(ErrorKind::Config,
                    "dna: chunk length must be >= 100 so a dummy prefix exists");

    std::vector<std::string> chunks;
    chunks.reserve(n_chunks);
    std::size_t pos = 0;
    std::size_t pending_dummy = 0;  // dummy bases owed by the upcoming chunk
    for (std::size_t i = 0; i < n_chunks; ++i) {
        if (pos + chunk_len > seq.size())
            throw Error(ErrorKind::Corruption,
                        "dna: sequence shorter than the schedule requires");
        chunks.push_back(seq.substr(pos, chunk_len));
        pos += chunk_len;
        if (pending_dummy) {
            // Gap i-1 drew from the second chunk, which is now known.
            if (chunks[i].compare(0, pending_dummy,
                                  seq, pos - chunk_len - pending_dummy,
                                  pending_dummy) != 0)
                throw Error(ErrorKind::Corruption,
                            "dna: dummy bases do not match donor chunk");
            pending_dummy = 0;
        }
        if (i + 1 == n_chunks) break;
        std::uint32_t s = dummy_count(params, params.x0 + i);
        if (pos + s > seq.size())
            throw Error(ErrorKind::Corruption,
                        "dna: sequence shorter than the schedule requires");
        if (pick_side(s) == DummySide::First) {
            if (seq.compare(pos, s, chunks[i], 0, s) != 0)
                throw Error(ErrorKind::Corruption,
                            "dna: dummy bases do not match donor chunk");
        } else {
            pending_dummy = s;
        }
        pos += s;
    }
    if (pos != seq.size())
        throw Error(ErrorKind::Corruption,
                    "dna: sequence longer than the schedule requires");
    return chunks;
}

}  // namespace medchain::dna
