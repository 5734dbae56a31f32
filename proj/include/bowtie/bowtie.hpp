#pragma once

#include "bowtie/date.hpp"
#include "bowtie/error.hpp"
#include "bowtie/graph.hpp"
#include "bowtie/ingest.hpp"
#include "bowtie/io.hpp"
#include "bowtie/macrostructure.hpp"
#include "bowtie/scc.hpp"
#include "bowtie/stats.hpp"
#include "bowtie/synth.hpp"
#include "bowtie/temporal.hpp"
