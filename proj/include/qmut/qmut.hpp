#pragma once

#include "bigint.hpp"
#include "canonical.hpp"
#include "dynamics.hpp"
#include "error.hpp"
#include "explorer.hpp"
#include "gadgets.hpp"
#include "io.hpp"
#include "quiver.hpp"
