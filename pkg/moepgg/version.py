# -*- coding: utf-8 -*-
'''
    moepgg.version
    ~~~~~~~~~~~~~~
'''

__version_info__ = (2024, 5, 0)
__version__ = '{0}.{1}.{2}'.format(*__version_info__)
