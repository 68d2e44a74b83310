#pragma once

#include "bayesqc/ab_test.hpp"
#include "bayesqc/beta.hpp"
#include "bayesqc/complexity.hpp"
#include "bayesqc/error.hpp"
#include "bayesqc/forecast.hpp"
#include "bayesqc/ingest.hpp"
#include "bayesqc/mcmc.hpp"
#include "bayesqc/report.hpp"
#include "bayesqc/rework.hpp"
#include "bayesqc/rng.hpp"
#include "bayesqc/stats.hpp"
#include "bayesqc/svg.hpp"
#include "bayesqc/version.hpp"
