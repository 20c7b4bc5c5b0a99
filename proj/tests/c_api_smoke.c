/* Compiled as C: the public header must stay C-compatible. */
#include "dqlab/dqlab.h"

#include <stddef.h>

int dqlab_c_smoke(void) {
    dqlab_config* cfg = NULL;
    dqlab_run* run = NULL;
    double norm[4];
    int ok = 0;
    if (dqlab_config_parse("problem = scalar_ode\np = 2\nu0_spec = const:0.1\nt_end = 10\n", &cfg) != DQLAB_OK) return -1;
    if (dqlab_simulate(cfg, &run) == DQLAB_OK && dqlab_run_sample_count(run) >= 4 &&
        dqlab_run_column(run, "norm_u", norm, 4) == DQLAB_OK && norm[0] == 0.1) {
        ok = dqlab_run_checks_passed(run);
    }
    dqlab_run_free(run);
    dqlab_config_free(cfg);
    return ok;
}
