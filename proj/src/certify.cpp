#include "codebound/sdpmodel.hpp"
