"""
Bath model, self-energies, bound states, dynamics and the finite-lattice oracle
"""
