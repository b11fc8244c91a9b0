#pragma once

#include <string>

#include "predex/dataset.hpp"
#include "predex/scoring.hpp"

namespace predex::testing {

// Rows 0..5 are the six rows of the small city/temp fixture (1-based in prose).
inline const char* t1_csv = "city,temp,score\n"
                            "Boston,30,9.0\n"
                            "Boston,31,8.0\n"
                            "Chicago,30,7.0\n"
                            "NYC,50,1.0\n"
                            "NYC,55,1.0\n"
                            "Chicago,52,1.0\n";

struct Fixture {
    Dataset ds;
    ScoreVector sv;
};

inline Fixture t1() {
    auto [ds, sv] = import_scores(read_csv(t1_csv), "score");
    return {std::move(ds), std::move(sv)};
}

} // namespace predex::testing
