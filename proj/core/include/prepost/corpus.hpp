#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace prepost {

struct CorpusProgram {
  std::string name;
  std::string source;  // DSL text, identical to corpus/<name>.mp
};

/// The bundled programs, in a fixed order.
const std::vector<CorpusProgram>& corpus();
/// Throws Error for an unknown name.
const CorpusProgram& corpus_program(std::string_view name);

/// `n` producer threads each send once on a shared channel; main receives n times.
std::string collector_source(std::size_t n);
/// A pipeline of `stages` forwarding threads; main pushes `messages` values
/// through it one at a time.
std::string add_pipe_source(std::size_t stages, std::size_t messages);
/// Sieve for the first `primes` primes, unrolled: the generator sends
/// 2..p_k and each filter forwards exactly the values that survive it.
std::string primesieve_source(std::size_t primes);

}  // namespace prepost
