#pragma once

#include <cctype>
#include <stdexcept>
#include <string>
#include <vector>

// Congruence quotients of Sanov's free subgroup of SL(2, Z): generators
// A = [[1,2],[0,1]], B = [[1,0],[2,1]]. Words use the alphabet {A, a, B, b}
// with lowercase meaning inverse. The quotient trace of a word at a prime p is
// 1 exactly when the word evaluates to the identity mod p, else 0 (the trace
// of a permutation representation of a nontrivial group element vanishes on
// the regular part; here only the delta at the identity survives).

namespace fsq {

inline bool is_prime(long n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (long d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

inline std::vector<long> primes_up_to(long n) {
  std::vector<long> out;
  for (long p = 2; p <= n; ++p)
    if (is_prime(p)) out.push_back(p);
  return out;
}

// |SL(2, Z/p)| = p (p-1) (p+1): the dimension of the quotient's regular
// representation, reported but never materialized.
inline long sl2_order(long p) { return p * (p - 1) * (p + 1); }

struct Mat2p {
  long a = 1, b = 0, c = 0, d = 1;

  bool is_identity() const { return a == 1 && b == 0 && c == 0 && d == 1; }
};

inline Mat2p mat2p_mul(const Mat2p& x, const Mat2p& y, long p) {
  Mat2p r;
  r.a = (x.a * y.a + x.b * y.c) % p;
  r.b = (x.a * y.b + x.b * y.d) % p;
  r.c = (x.c * y.a + x.d * y.c) % p;
  r.d = (x.c * y.b + x.d * y.d) % p;
  return r;
}

inline void validate_word_alphabet(const std::string& word) {
  for (char ch : word)
    if (ch != 'A' && ch != 'a' && ch != 'B' && ch != 'b')
      throw std::invalid_argument(
          "word: letters must be A, a, B, b (lowercase = inverse)");
}

// Free reduction: cancel adjacent inverse pairs.
inline std::string reduce_word(const std::string& word) {
  validate_word_alphabet(word);
  std::string out;
  for (char ch : word) {
    if (!out.empty() && out.back() != ch &&
        std::tolower(out.back()) == std::tolower(ch))
      out.pop_back();
    else
      out.push_back(ch);
  }
  return out;
}

inline std::string invert_word(const std::string& word) {
  validate_word_alphabet(word);
  std::string out;
  for (auto it = word.rbegin(); it != word.rend(); ++it)
    out.push_back(std::isupper(*it) ? static_cast<char>(std::tolower(*it))
                                    : static_cast<char>(std::toupper(*it)));
  return out;
}

inline Mat2p sanov_letter(char ch, long p) {
  switch (ch) {
    case 'A': return {1, 2 % p, 0, 1};
    case 'a': return {1, (p - 2 % p) % p, 0, 1};
    case 'B': return {1, 0, 2 % p, 1};
    case 'b': return {1, 0, (p - 2 % p) % p, 1};
    default:
      throw std::invalid_argument("word: letters must be A, a, B, b");
  }
}

inline Mat2p eval_word(const std::string& word, long p) {
  Mat2p m;
  for (char ch : word) m = mat2p_mul(m, sanov_letter(ch, p), p);
  return m;
}

struct QuotientTraceRow {
  std::string word;  // as given
  long p = 0;
  bool is_identity_word = false;  // word reduces to the empty word
  int trace = 0;                  // 1 iff the word is identity in SL(2, Z/p)
};

inline QuotientTraceRow sanov_trace(const std::string& word, long p) {
  if (!is_prime(p)) throw std::domain_error("sanov_trace: p must be prime");
  QuotientTraceRow row;
  row.word = word;
  row.p = p;
  row.is_identity_word = reduce_word(word).empty();
  row.trace = eval_word(word, p).is_identity() ? 1 : 0;
  return row;
}

struct TraceTableRow {
  std::string word;
  bool is_identity_word = false;
  std::vector<int> traces;        // aligned with the prime list
  bool eventually_zero = false;   // a nonempty all-zero tail within the scan
  long tail_start_prime = 0;      // first prime of that tail (0 if none)
};

struct TraceTable {
  std::vector<long> primes;
  std::vector<TraceTableRow> rows;
  bool converges_to_delta_e = false;
};

inline TraceTable trace_convergence_table(const std::vector<std::string>& words,
                                          const std::vector<long>& primes) {
  if (words.empty() || primes.empty())
    throw std::invalid_argument("trace_convergence_table: empty input");
  TraceTable table;
  table.primes = primes;
  table.converges_to_delta_e = true;
  for (const auto& w : words) {
    TraceTableRow row;
    row.word = w;
    row.is_identity_word = reduce_word(w).empty();
    for (long p : primes) row.traces.push_back(sanov_trace(w, p).trace);
    std::size_t tail = row.traces.size();
    while (tail > 0 && row.traces[tail - 1] == 0) --tail;
    row.eventually_zero = tail < row.traces.size();
    if (row.eventually_zero) row.tail_start_prime = primes[tail];
    if (row.is_identity_word) {
      for (int t : row.traces)
        if (t != 1) table.converges_to_delta_e = false;
    } else if (!row.eventually_zero) {
      table.converges_to_delta_e = false;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

// All reduced nontrivial words of length <= max_len (test/report helper).
inline std::vector<std::string> reduced_words_up_to(int max_len) {
  const char letters[4] = {'A', 'a', 'B', 'b'};
  std::vector<std::string> out;
  std::vector<std::string> frontier{""};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<std::string> next;
    for (const auto& w : frontier)
      for (char ch : letters) {
        if (!w.empty()) {
          const char last = w.back();
          if (last != ch && std::tolower(last) == std::tolower(ch)) continue;
        }
        next.push_back(w + ch);
      }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

}  // namespace fsq
