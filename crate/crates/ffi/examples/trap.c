/* Switching costs on [-2, 2]: three slots of c = -1, then c = +1. */
#include <stdio.h>
#include "optfprl.h"

int main(void) {
    double radius = 2.0, pred = 0.0, x = 0.0;
    OptfprlLearner *h = NULL;
    if (optfprl_learner_new(OPTFPRL_SET_KIND_BALL, 1, &radius, OPTFPRL_STRATEGY_AGNOSTIC,
                            0.0, 1, &pred, &h) != OPTFPRL_STATUS_OK) {
        char msg[256];
        optfprl_last_error_message(msg, sizeof msg);
        fprintf(stderr, "create failed: %s\n", msg);
        return 1;
    }
    for (int t = 1; t <= 8; t++) {
        double c = t <= 3 ? -1.0 : 1.0;
        OptfprlStepInfo info;
        optfprl_learner_step(h, 1, &c, &pred, NULL, &x, &info);
        printf("t=%d x_next=%+.4f |p|=%.4f sigma=%.4f\n", t, x, info.state_norm, info.sigma_cum);
    }
    optfprl_learner_free(h);
    return 0;
}
