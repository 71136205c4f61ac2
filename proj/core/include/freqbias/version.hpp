#pragma once

#define FREQBIAS_VERSION_MAJOR 0
#define FREQBIAS_VERSION_MINOR 1
#define FREQBIAS_VERSION_PATCH 0
#define FREQBIAS_VERSION "0.1.0"

namespace freqbias {

inline const char* version() { return FREQBIAS_VERSION; }

}  // namespace freqbias
