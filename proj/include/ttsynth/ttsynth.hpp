#pragma once

#include "ttsynth/core.hpp"
#include "ttsynth/ilp.hpp"
#include "ttsynth/semantics.hpp"
#include "ttsynth/regions.hpp"
#include "ttsynth/synthesis.hpp"
#include "ttsynth/convert.hpp"
#include "ttsynth/io.hpp"
