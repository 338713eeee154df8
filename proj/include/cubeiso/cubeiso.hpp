#pragma once

#include "cubeiso/bits.hpp"
#include "cubeiso/cube.hpp"
#include "cubeiso/functionals.hpp"
#include "cubeiso/parallel.hpp"
#include "cubeiso/rng.hpp"
#include "cubeiso/search.hpp"
#include "cubeiso/shifting.hpp"
#include "cubeiso/stability.hpp"
#include "cubeiso/verification.hpp"
