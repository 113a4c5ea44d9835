// Minimal external drift evaluator for the protocol tests: answers each
// request "x1 ... xD t" with 2·x, or with a truncated answer when started
// with "short".
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  const bool truncated = argc > 1 && std::string(argv[1]) == "short";
  std::string line;
  while (std::getline(std::cin, line)) {
    std::istringstream in(line);
    std::vector<double> values;
    for (double v; in >> v;) values.push_back(v);
    if (values.empty()) continue;
    values.pop_back();
    const std::size_t keep = truncated ? 1 : values.size();
    for (std::size_t i = 0; i < keep; ++i) std::cout << (i ? " " : "") << 2.0 * values[i];
    std::cout << '\n';
    if (std::cin.rdbuf()->in_avail() <= 0) std::cout.flush();
  }
}
