#pragma once

#include "tsad/background.hpp"
#include "tsad/config.hpp"
#include "tsad/detect.hpp"
#include "tsad/error.hpp"
#include "tsad/io.hpp"
#include "tsad/labels.hpp"
#include "tsad/media.hpp"
#include "tsad/metrics.hpp"
#include "tsad/simgen.hpp"
#include "tsad/smoothing.hpp"
