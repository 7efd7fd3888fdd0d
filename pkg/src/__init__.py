# sketchboost: multioutput gradient boosting with sketched split search
