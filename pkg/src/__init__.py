"""
SSH Bath: emitters in closed, dissipative and mirage Su-Schrieffer-Heeger photonic baths
"""
