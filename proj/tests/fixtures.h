#pragma once

#include <string>

#include "chunktag/corpus.h"

namespace fixtures {

// "ein in Tel Aviv lebender Maler": a painter living in Tel Aviv.
inline const std::string kTelAviv =
    "(NP ein/ART (AP (PP in/APPR (MPN Tel/NE Aviv/NE)) lebender/ADJA) Maler/NN)";

inline chunktag::Sentence tel_aviv() { return chunktag::parse_sentence(kTelAviv); }

}  // namespace fixtures
