#include "pbfcontrol/paths.hpp"
