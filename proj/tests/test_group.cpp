#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>

#include "fsq/sanov.hpp"
#include "fsq/verify.hpp"

TEST_CASE("primality and group orders") {
  REQUIRE(fsq::is_prime(2));
  REQUIRE(fsq::is_prime(199));
  REQUIRE_FALSE(fsq::is_prime(1));
  REQUIRE_FALSE(fsq::is_prime(91));  // 7 * 13
  REQUIRE(fsq::primes_up_to(30) ==
          std::vector<long>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29});
  REQUIRE(fsq::sl2_order(2) == 6);
  REQUIRE(fsq::sl2_order(5) == 120);
}

TEST_CASE("word plumbing: reduce, invert, alphabet") {
  REQUIRE(fsq::reduce_word("AaBb").empty());
  REQUIRE(fsq::reduce_word("ABba") == "");
  REQUIRE(fsq::reduce_word("ABbA") == "AA");
  REQUIRE(fsq::reduce_word("ABAB") == "ABAB");
  REQUIRE(fsq::invert_word("AB") == "ba");
  REQUIRE(fsq::invert_word("ABab") == "BAba");
  REQUIRE_NOTHROW(fsq::validate_word_alphabet(""));
  REQUIRE_THROWS_AS(fsq::validate_word_alphabet("AxB"), std::invalid_argument);
}

TEST_CASE("generator matrices and determinants mod p") {
  for (long p : {2L, 3L, 5L, 7L, 11L}) {
    for (char ch : {'A', 'a', 'B', 'b'}) {
      const fsq::Mat2p m = fsq::sanov_letter(ch, p);
      const long det = ((m.a * m.d - m.b * m.c) % p + p) % p;
      REQUIRE(det == 1 % p);
    }
    const fsq::Mat2p big_a = fsq::sanov_letter('A', p);
    REQUIRE(big_a.b == 2 % p);
    // A * a = identity in the quotient.
    REQUIRE(fsq::mat2p_mul(fsq::sanov_letter('A', p), fsq::sanov_letter('a', p), p)
                .is_identity());
  }
}

TEST_CASE("word A dies at p = 2 only") {
  REQUIRE(fsq::sanov_trace("A", 2).trace == 1);
  for (long p : fsq::primes_up_to(100))
    if (p > 2) REQUIRE(fsq::sanov_trace("A", p).trace == 0);
}

TEST_CASE("commutator word ABab: golden convergence row") {
  // Over the integers ABab = [[21, -8], [8, -3]]; it is the identity mod p
  // exactly when p divides 8 and 20 and -4, i.e. only at p = 2.
  const fsq::TraceTable table =
      fsq::trace_convergence_table({"ABab"}, fsq::primes_up_to(200));
  REQUIRE(table.rows.size() == 1);
  const fsq::TraceTableRow& row = table.rows[0];
  REQUIRE_FALSE(row.is_identity_word);
  REQUIRE(row.traces.front() == 1);  // p = 2
  for (std::size_t i = 1; i < row.traces.size(); ++i)
    REQUIRE(row.traces[i] == 0);
  REQUIRE(row.eventually_zero);
  REQUIRE(row.tail_start_prime == 3);
  REQUIRE(table.converges_to_delta_e);
}

TEST_CASE("identity words trace to 1 at every prime") {
  const fsq::TraceTable table =
      fsq::trace_convergence_table({"", "aA", "AbBa"}, fsq::primes_up_to(60));
  for (const auto& row : table.rows) {
    REQUIRE(row.is_identity_word);
    for (int t : row.traces) REQUIRE(t == 1);
    REQUIRE_FALSE(row.eventually_zero);
  }
  REQUIRE(table.converges_to_delta_e);
}

TEST_CASE("a word surviving the whole scan spoils the verdict") {
  // Any nontrivial word dies for large p (faithfulness of the quotients on a
  // finite set), so to see a false verdict we must scan a window that stops
  // before the word dies. AA = [[1,4],[0,1]] survives exactly at p = 2: scan
  // only p = 2.
  const fsq::TraceTable table = fsq::trace_convergence_table({"AA"}, {2});
  REQUIRE_FALSE(table.rows[0].eventually_zero);
  REQUIRE_FALSE(table.converges_to_delta_e);
}

TEST_CASE("every nontrivial word of length <= 3 eventually dies") {
  const std::vector<std::string> words = fsq::reduced_words_up_to(3);
  REQUIRE(words.size() == 52);  // 4 + 12 + 36
  const std::set<std::string> dedup(words.begin(), words.end());
  REQUIRE(dedup.size() == 52);
  const fsq::TraceTable table =
      fsq::trace_convergence_table(words, fsq::primes_up_to(200));
  REQUIRE(table.converges_to_delta_e);
  for (const auto& row : table.rows) {
    REQUIRE_FALSE(row.is_identity_word);
    REQUIRE(row.eventually_zero);
  }
}

TEST_CASE("trace values are 0/1 and require a prime modulus") {
  for (long p : fsq::primes_up_to(50))
    for (const auto& w : {"A", "Bb", "ABAB", "bbA"}) {
      const int t = fsq::sanov_trace(w, p).trace;
      REQUIRE((t == 0 || t == 1));
    }
  REQUIRE_THROWS_AS(fsq::sanov_trace("A", 4), std::domain_error);
  REQUIRE_THROWS_AS(fsq::sanov_trace("A", 1), std::domain_error);
}

TEST_CASE("sanov fuzz suite passes") {
  const fsq::VerifyReport rep = fsq::verify_sanov(300, 77);
  REQUIRE(rep.pass);
}
