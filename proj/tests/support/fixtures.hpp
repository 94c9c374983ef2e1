#pragma once

#include <sstream>
#include <string>

#include "pathrel/conllu.hpp"

namespace fixtures {

// "A dog is a mammal", parsed: dog --nsubj--> is <--attr-- mammal.
inline const char* kDogMammalConllu =
    "# text = A dog is a mammal\n"
    "1\tA\ta\tDET\t_\t_\t2\tdet\t_\t_\n"
    "2\tdog\tdog\tNOUN\t_\t_\t3\tnsubj\t_\t_\n"
    "3\tis\tbe\tVERB\t_\t_\t0\tROOT\t_\t_\n"
    "4\ta\ta\tDET\t_\t_\t5\tdet\t_\t_\n"
    "5\tmammal\tmammal\tNOUN\t_\t_\t3\tattr\t_\t_\n"
    "\n";

inline pathrel::ParsedSentence dog_mammal_sentence() {
    std::istringstream in(kDogMammalConllu);
    auto sentences = pathrel::parse_conllu_all(in);
    return sentences.at(0);
}

// Tiny embedding file: 3 words, dim 4.
inline const char* kTinyEmbeddings =
    "dog 1 2 3 4\n"
    "mammal 0 0 0 8\n"
    "cat -1 -2 -3 -4\n";

}  // namespace fixtures
