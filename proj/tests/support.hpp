#pragma once

#include <string>

#include "socert/model.hpp"
#include "socert/report.hpp"

namespace testing_support {

inline socert::NlpProblem gallery(const std::string& id) {
  return socert::load_problem(socert::gallery_dir() / (id + ".nlp"));
}

inline bool is_symmetric(const socert::Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (m(i, j) != m(j, i)) return false;
  return true;
}

}  // namespace testing_support
