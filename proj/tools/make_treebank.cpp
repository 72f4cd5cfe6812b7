// Builds the supertagger training treebank: the best learner-mode reading of
// each sentence of a suite, one `id TAB sentence TAB derivation` line each.
#include <fstream>
#include <iostream>

#include "coach/coach.hpp"
#include "coach/profiler.hpp"

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: make_treebank <grammar> <suite> <out>\n";
    return 2;
  }
  try {
    auto g = coach::load_grammar_file(coach::resolve_grammar_path(argv[1]), coach::GrammarMode::learner);
    coach::Parser parser(g);
    std::ofstream out(argv[3], std::ios::binary);
    out << "# id\tsentence\tderivation (best learner-mode reading)\n";
    for (const auto& item : coach::read_suite(argv[2])) {
      auto result = parser.parse(item.sentence);
      const coach::Reading* best = coach::select_reading(result);
      if (!best) {
        std::cerr << item.id << ": no reading\n";
        return 1;
      }
      if ((item.expected == coach::Expected::learner) == best->learner_uses.empty()) {
        std::cerr << item.id << ": best reading disagrees with the annotation\n";
        return 1;
      }
      out << item.id << '\t' << item.sentence << '\t' << best->derivation_string << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
