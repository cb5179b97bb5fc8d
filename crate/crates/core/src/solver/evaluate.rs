use std::sync::Arc;

use super::certificate::MyopicCertificate;
use super::regularize::{regularized_payoffs, RegularizationConfig};
use super::SolverError;
use crate::model::{GameBundle, PayoffKind, Table};
use crate::strategies::{
    make_plan, reach, values_from_table, GameForm, MixedProfile, Plan, Selector,
};

/// v(σ) = (f^n_φ(s)) for a fixed bundle, root distribution and selector.
/// Bundles whose continuations are all constant reuse one payoff table.
pub(crate) struct Evaluator<'a> {
    pub bundle: &'a GameBundle,
    pub form: Arc<GameForm>,
    pub q: Vec<f64>,
    pub selector: Selector,
    pub regularization: Option<RegularizationConfig>,
    pub sizes: Vec<usize>,
    fixed_y: Option<Table>,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        bundle: &'a GameBundle,
        q: &[f64],
        selector: Selector,
        regularization: Option<RegularizationConfig>,
    ) -> Result<Self, SolverError> {
        let form = bundle.bush().form()?.clone();
        let sizes = form.counts();
        let constant = bundle
            .continuations()
            .iter()
            .all(|m| matches!(m.kind(), PayoffKind::Constant(_)));
        let fixed_y = if constant && regularization.is_none() {
            Some(make_plan(bundle, q, &MixedProfile::uniform(&form), &Selector::First)?.y)
        } else {
            None
        };
        if let Some(r) = &regularization {
            r.check_for(bundle)?;
        }
        Ok(Self {
            bundle,
            form,
            q: q.to_vec(),
            selector,
            regularization,
            sizes,
            fixed_y,
        })
    }

    /// The payoff table the profile is judged against.
    pub fn table(&self, sigma: &MixedProfile) -> Result<Table, SolverError> {
        if let Some(y) = &self.fixed_y {
            return Ok(y.clone());
        }
        Ok(match &self.regularization {
            Some(r) => regularized_payoffs(self.bundle, &self.q, sigma, &self.selector, r)?.y,
            None => make_plan(self.bundle, &self.q, sigma, &self.selector)?.y,
        })
    }

    pub fn values(&self, sigma: &MixedProfile) -> Result<Vec<Vec<f64>>, SolverError> {
        let y = match &self.fixed_y {
            Some(y) => return Ok(values_from_table(&self.form, &self.q, sigma, y)),
            None => self.table(sigma)?,
        };
        Ok(values_from_table(&self.form, &self.q, sigma, &y))
    }

    /// The plan for σ. Under regularization its table holds F_ε payoffs and
    /// carries no witnesses, so it is not a plan of the original bundle.
    pub fn plan(&self, sigma: &MixedProfile) -> Result<Plan, SolverError> {
        match &self.regularization {
            None => Ok(make_plan(self.bundle, &self.q, sigma, &self.selector)?),
            Some(r) => {
                let reg = regularized_payoffs(self.bundle, &self.q, sigma, &self.selector, r)?;
                let report = reach(self.bundle, &self.q, sigma)?;
                Ok(Plan {
                    q: self.q.clone(),
                    sigma: sigma.clone(),
                    y: reg.y,
                    witness: vec![None; self.bundle.meet().len()],
                    reach: report,
                })
            }
        }
    }

    pub fn certify(
        &self,
        sigma: &MixedProfile,
        tol: f64,
    ) -> Result<(Plan, MyopicCertificate), SolverError> {
        let plan = self.plan(sigma)?;
        let values = values_from_table(&self.form, &self.q, sigma, &plan.y);
        let cert = MyopicCertificate::from_values(&sigma.weights, values, tol);
        Ok((plan, cert))
    }
}
